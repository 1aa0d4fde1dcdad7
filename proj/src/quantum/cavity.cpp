#include "rclab/quantum/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "rclab/format.hpp"
#include "rclab/parallel.hpp"
#include "rclab/quantum/oscillator.hpp"

namespace rclab::quantum {

namespace {

Dims cavity_dims(const CavityQrcParams& p) { return {p.n_max + 1, 2}; }

ComplexMatrix cavity_collapse(const CavityQrcParams& p) {
  return std::sqrt(p.kappa) * kron(destroy(p.n_max + 1), identity(2));
}

void check_dt(const CavityQrcParams& p, const LindbladIntegrator& lind) {
  if (p.dt > lind.max_stable_dt())
    throw ConfigError("cavity_qrc: dt=" + format_double(p.dt) + " exceeds the RK4 stability limit " +
                      format_double(lind.max_stable_dt()));
}

}  // namespace

void CavityQrcParams::validate() const {
  require(n_max >= 2, "cavity: n_max must be >= 2");
  require(dim() <= kMaxHilbertDim, "cavity: 2 (n_max + 1) exceeds the Hilbert cap of 256");
  require(kappa >= 0.0 && std::isfinite(kappa), "cavity: kappa must be >= 0");
  require(dt > 0.0 && std::isfinite(dt), "cavity: dt must be > 0");
  require(steps_per_input >= 1, "cavity: steps_per_input must be >= 1");
  require(std::isfinite(g) && std::isfinite(g_z) && std::isfinite(beta_scale), "cavity: parameters must be finite");
  require(measurement != MeasurementMode::Shots || shots >= 1, "cavity: shots must be >= 1");
  require(measurement != MeasurementMode::Rewind || rewind_window >= 1, "cavity: rewind window must be >= 1");
  require(leakage_tol > 0.0, "cavity: leakage_tol must be > 0");
}

ComplexMatrix build_cavity_hamiltonian(const CavityQrcParams& p, double beta) {
  p.validate();
  const Index levels = p.n_max + 1;
  const ComplexMatrix a = destroy(levels);
  // sigma_+ = |e><g|
  ComplexMatrix sp = ComplexMatrix::Zero(2, 2);
  sp(1, 0) = 1.0;
  const ComplexMatrix sm = sp.adjoint();
  ComplexMatrix h = p.coupling == CavityCoupling::Printed
                        ? ComplexMatrix(p.g * kron(ComplexMatrix(a.adjoint() * a), ComplexMatrix(sm * sp)))
                        : ComplexMatrix(p.g * (kron(a, sp) + kron(ComplexMatrix(a.adjoint()), sm)));
  h += Complex(0.0, -beta) * kron(ComplexMatrix(a.adjoint() - a), identity(2));
  h += p.g_z * kron(identity(levels), ComplexMatrix(sp + sm));
  return h;
}

CavityStepResult cavity_step(const DensityMatrix& rho, double u, const CavityQrcParams& p) {
  p.validate();
  require(rho.dims() == cavity_dims(p), "cavity_step: state dims do not match n_max");
  check_leakage(rho, p.leakage_tol, {0});
  const LindbladIntegrator lind(build_cavity_hamiltonian(p, p.beta_scale * u), {cavity_collapse(p)});
  check_dt(p, lind);
  DensityMatrix next = rho;
  for (Index s = 0; s < p.steps_per_input; ++s) next = lind.step(next, p.dt);
  Eigen::VectorXd f = next.populations();
  return {std::move(next), std::move(f)};
}

Eigen::VectorXd sample_frequencies(const Eigen::VectorXd& probabilities, Index shots, Xoshiro256& rng) {
  require(shots >= 1, "sample_frequencies: shots must be >= 1");
  std::vector<double> cdf(static_cast<std::size_t>(probabilities.size()));
  double acc = 0.0;
  for (Index k = 0; k < probabilities.size(); ++k) {
    acc += std::max(0.0, probabilities[k]);
    cdf[static_cast<std::size_t>(k)] = acc;
  }
  require(acc > 0.0, "sample_frequencies: probabilities sum to zero");
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(probabilities.size());
  for (Index s = 0; s < shots; ++s) {
    const double r = rng.uniform01() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    const auto k = std::min<std::ptrdiff_t>(it - cdf.begin(), probabilities.size() - 1);
    counts[k] += 1.0;
  }
  return counts / static_cast<double>(shots);
}

CavityReservoir::CavityReservoir(const CavityQrcParams& params)
    : params_(params),
      h_static_(build_cavity_hamiltonian(params, 0.0)),
      h_drive_(build_cavity_hamiltonian(params, 1.0) - h_static_),
      lindblad_(h_static_, {cavity_collapse(params)}),
      rho_(initial_state()),
      features_(rho_.populations()),
      rng_(params.seed) {}

DensityMatrix CavityReservoir::initial_state() const { return DensityMatrix::basis_state(0, cavity_dims(params_)); }

void CavityReservoir::reset() {
  rho_ = initial_state();
  features_ = rho_.populations();
  rng_ = Xoshiro256(params_.seed);
  history_.clear();
}

void CavityReservoir::set_state(const DensityMatrix& rho) {
  require(rho.dims() == cavity_dims(params_), "CavityReservoir::set_state: dims mismatch");
  rho_ = rho;
}

void CavityReservoir::advance(DensityMatrix& rho, double u) {
  lindblad_.set_hamiltonian(h_static_ + (params_.beta_scale * u) * h_drive_);
  check_dt(params_, lindblad_);
  for (Index s = 0; s < params_.steps_per_input; ++s) rho = lindblad_.step(rho, params_.dt);
  check_leakage(rho, params_.leakage_tol, {0});
}

void CavityReservoir::step(const Eigen::VectorXd& u) {
  require(u.size() == 1, "cavity_qrc: expects a scalar input");
  switch (params_.measurement) {
    case MeasurementMode::Ensemble:
      advance(rho_, u[0]);
      features_ = rho_.populations();
      break;
    case MeasurementMode::Shots:
      advance(rho_, u[0]);
      features_ = sample_frequencies(rho_.populations(), params_.shots, rng_);
      break;
    case MeasurementMode::Rewind:
      history_.push_back(u[0]);
      if (static_cast<Index>(history_.size()) > params_.rewind_window) history_.pop_front();
      rho_ = initial_state();
      for (double v : history_) advance(rho_, v);
      features_ = rho_.populations();
      break;
  }
}

std::vector<ZenoRow> zeno_sweep(const CavityQrcParams& p, const std::vector<double>& g_z_values,
                                const TaskData& task, const SplitPlan& split, unsigned threads) {
  require(g_z_values.size() >= 2, "zeno_sweep: need at least two g_z values");
  std::vector<ZenoRow> rows(g_z_values.size());
  parallel_for(g_z_values.size(), threads, [&](std::size_t i) {
    CavityQrcParams q = p;
    q.g_z = g_z_values[i];
    CavityReservoir res(q);
    const Evaluation e = drive_and_fit(res, task.input, task.target, split);
    rows[i] = {q.g_z, e.train_nmse, e.test_nmse, q.seed};
  });
  return rows;
}

void write_zeno_csv(std::ostream& os, const std::vector<ZenoRow>& rows) {
  os << "g_z,train_nmse,test_nmse,seed\n";
  for (const auto& r : rows)
    os << format_double(r.g_z) << ',' << format_double(r.train_nmse) << ',' << format_double(r.test_nmse) << ','
       << r.seed << '\n';
}

}  // namespace rclab::quantum
