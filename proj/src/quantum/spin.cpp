#include "rclab/quantum/spin.hpp"

#include <cmath>
#include <string>

#include "rclab/random.hpp"

namespace rclab::quantum {

namespace {

Index qubit_count(Index dim) {
  Index n = 0;
  while ((Index{1} << n) < dim) ++n;
  require((Index{1} << n) == dim, "spin: Hilbert dimension is not a power of two");
  return n;
}

// Bit of basis index k belonging to qubit i (qubit 0 is the most significant).
inline bool bit(Index k, Index i, Index n) { return (k >> (n - 1 - i)) & 1; }

void evolve_segment(DensityMatrix& rho, const ComplexMatrix& u, Index virtual_nodes, SpinObservables obs,
                    Eigen::VectorXd& features) {
  Index width = 0;
  for (Index v = 0; v < virtual_nodes; ++v) {
    rho = conjugate(rho, u);
    const Eigen::VectorXd f = spin_observables(rho, obs);
    if (v == 0) {
      width = f.size();
      features.resize(virtual_nodes * width);
    }
    features.segment(v * width, width) = f;
  }
}

}  // namespace

void SpinQrcParams::validate() const {
  require(n_qubits >= 2 && n_qubits <= 8, "spin: n_qubits must be in [2, 8], got " + std::to_string(n_qubits));
  require(std::isfinite(coupling) && std::isfinite(field), "spin: J and h must be finite");
  require(dt > 0.0 && std::isfinite(dt), "spin: dt must be > 0");
  require(virtual_nodes >= 1, "spin: virtual_nodes must be >= 1");
  require(local_fields.empty() || static_cast<Index>(local_fields.size()) == n_qubits,
          "spin: local_fields must have one entry per qubit");
  require(input_qubit >= 0 && input_qubit < n_qubits, "spin: input_qubit out of range");
}

Index SpinQrcParams::features_per_node() const {
  Index w = n_qubits;
  if (observables.sigma_x) w += n_qubits;
  if (observables.zz) w += n_qubits * (n_qubits - 1) / 2;
  return w;
}

ComplexMatrix build_ising_hamiltonian(const SpinQrcParams& p) {
  p.validate();
  const Index n = p.n_qubits;
  const Index dim = Index{1} << n;

  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  Xoshiro256 rng(p.seed);
  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b) {
      const double v = p.couplings == CouplingMode::Uniform ? p.coupling
                                                            : rng.uniform(-0.5 * p.coupling, 0.5 * p.coupling);
      j(a, b) = j(b, a) = v;
    }
  const double pair_weight = p.pair_sum == PairSum::Ordered ? 2.0 : 1.0;

  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (Index k = 0; k < dim; ++k) {
    double diag = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double hi = p.local_fields.empty() ? p.field : p.local_fields[i];
      diag += bit(k, i, n) ? -hi : hi;
    }
    h(k, k) = diag;
    // sigma_x^a sigma_x^b flips both bits.
    for (Index a = 0; a < n; ++a)
      for (Index b = a + 1; b < n; ++b) {
        const Index flipped = k ^ (Index{1} << (n - 1 - a)) ^ (Index{1} << (n - 1 - b));
        h(flipped, k) += pair_weight * j(a, b);
      }
  }
  return h;
}

ComplexMatrix encode_input(double s) {
  require(std::isfinite(s) && s >= 0.0 && s <= 1.0, "encode_input: s must lie in [0, 1]");
  ComplexVector psi(2);
  psi << std::sqrt(1.0 - s), std::sqrt(s);
  return psi * psi.adjoint();
}

Eigen::VectorXd spin_observables(const DensityMatrix& rho, SpinObservables obs) {
  const Index dim = rho.dim();
  const Index n = qubit_count(dim);
  const Eigen::VectorXd p = rho.populations();
  const Index pairs = n * (n - 1) / 2;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n + (obs.sigma_x ? n : 0) + (obs.zz ? pairs : 0));
  for (Index k = 0; k < dim; ++k)
    for (Index i = 0; i < n; ++i) out[i] += bit(k, i, n) ? -p[k] : p[k];
  Index off = n;
  if (obs.sigma_x) {
    const ComplexMatrix& m = rho.matrix();
    for (Index i = 0; i < n; ++i) {
      const Index mask = Index{1} << (n - 1 - i);
      double acc = 0.0;
      for (Index k = 0; k < dim; ++k) acc += m(k, k ^ mask).real();
      out[off + i] = acc;
    }
    off += n;
  }
  if (obs.zz) {
    Index c = off;
    for (Index a = 0; a < n; ++a)
      for (Index b = a + 1; b < n; ++b, ++c) {
        double acc = 0.0;
        for (Index k = 0; k < dim; ++k) acc += (bit(k, a, n) == bit(k, b, n)) ? p[k] : -p[k];
        out[c] = acc;
      }
  }
  return out;
}

InjectionResult inject_and_evolve(const DensityMatrix& state, double s, const ComplexMatrix& h, double dt,
                                  Index virtual_nodes, Index input_qubit, SpinObservables observables) {
  require(dt > 0.0, "inject_and_evolve: dt must be > 0");
  require(virtual_nodes >= 1, "inject_and_evolve: virtual_nodes must be >= 1");
  require(h.rows() == state.dim(), "inject_and_evolve: Hamiltonian dimension mismatch");
  const ComplexMatrix u = UnitaryEvolver(h).unitary(dt / static_cast<double>(virtual_nodes));
  InjectionResult result{replace_factor(state, input_qubit, encode_input(s)), {}};
  evolve_segment(result.state, u, virtual_nodes, observables, result.features);
  return result;
}

SpinReservoir::SpinReservoir(const SpinQrcParams& params)
    : params_(params),
      h_(build_ising_hamiltonian(params)),
      sub_unitary_(UnitaryEvolver(h_).unitary(params.dt / static_cast<double>(params.virtual_nodes))),
      state_(DensityMatrix::basis_state(0, Dims(params.n_qubits, 2))),
      features_(Eigen::VectorXd::Zero(params.virtual_nodes * params.features_per_node())) {}

void SpinReservoir::reset() {
  state_ = DensityMatrix::basis_state(0, Dims(params_.n_qubits, 2));
  features_.setZero();
}

void SpinReservoir::set_state(const DensityMatrix& rho) {
  require(rho.dims() == Dims(params_.n_qubits, 2), "SpinReservoir::set_state: dims mismatch");
  state_ = rho;
}

void SpinReservoir::step(const Eigen::VectorXd& u) {
  require(u.size() == 1, "spin_qrc: expects a scalar input");
  state_ = replace_factor(state_, params_.input_qubit, encode_input(u[0]));
  evolve_segment(state_, sub_unitary_, params_.virtual_nodes, params_.observables, features_);
  if (std::abs(state_.trace() - 1.0) > 1e-9) throw NumericError("spin_qrc: trace drift after injection");
}

SpatialMultiplexReservoir::SpatialMultiplexReservoir(std::vector<std::unique_ptr<Reservoir>> members)
    : members_(std::move(members)) {
  require(!members_.empty(), "spatial_multiplex: need at least one reservoir");
  for (const auto& m : members_)
    require(m->input_width() == members_.front()->input_width(), "spatial_multiplex: input widths differ");
}

void SpatialMultiplexReservoir::reset() {
  for (auto& m : members_) m->reset();
}

void SpatialMultiplexReservoir::step(const Eigen::VectorXd& u) {
  for (auto& m : members_) m->step(u);
}

Eigen::VectorXd SpatialMultiplexReservoir::observe() const {
  Eigen::VectorXd out(feature_width());
  Index off = 0;
  for (const auto& m : members_) {
    const Eigen::VectorXd f = m->observe();
    out.segment(off, f.size()) = f;
    off += f.size();
  }
  return out;
}

Index SpatialMultiplexReservoir::feature_width() const {
  Index w = 0;
  for (const auto& m : members_) w += m->feature_width();
  return w;
}

Eigen::MatrixXd spatial_multiplex(std::vector<SpinReservoir>& reservoirs, const TimeSeries& input) {
  require(!reservoirs.empty(), "spatial_multiplex: need at least one reservoir");
  Eigen::Index width = 0;
  for (const auto& r : reservoirs) width += r.feature_width();
  Eigen::MatrixXd out(input.steps(), width);
  Eigen::Index off = 0;
  for (auto& r : reservoirs) {
    out.middleCols(off, r.feature_width()) = drive(r, input);
    off += r.feature_width();
  }
  return out;
}

}  // namespace rclab::quantum
