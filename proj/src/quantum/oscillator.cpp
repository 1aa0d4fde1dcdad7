#include "rclab/quantum/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rclab/format.hpp"

namespace rclab::quantum {

namespace {

Complex classical_rhs(Complex a, double u, const KerrParams& p) {
  const Complex i(0.0, 1.0);
  const Complex kerr =
      p.classical_variant == ClassicalVariant::AsPrinted ? p.K * (a - 2.0 * std::conj(a)) : p.K * std::norm(a) * a;
  return -i * kerr - 0.5 * p.kappa * a - i * p.gain * u;
}

void check_step(double dt, const LindbladIntegrator& lind, const std::string& who) {
  if (dt > lind.max_stable_dt())
    throw ConfigError(who + ": dt=" + format_double(dt) + " exceeds the RK4 stability limit " +
                      format_double(lind.max_stable_dt()) + "; lower dt or K, or reduce n_max");
}

}  // namespace

void KerrParams::validate() const {
  require(n_max >= 2, "kerr: n_max must be >= 2");
  require(kappa >= 0.0 && std::isfinite(kappa), "kerr: kappa must be >= 0");
  require(dt > 0.0 && std::isfinite(dt), "kerr: dt must be > 0");
  require(steps_per_input >= 1, "kerr: steps_per_input must be >= 1");
  require(std::isfinite(K) && std::isfinite(gain), "kerr: K and gain must be finite");
  require(leakage_tol > 0.0, "kerr: leakage_tol must be > 0");
}

ClassicalOscState classical_kerr_step(const ClassicalOscState& state, double u, const KerrParams& p) {
  const double h = p.dt;
  const Complex a = state.a;
  const Complex k1 = classical_rhs(a, u, p);
  const Complex k2 = classical_rhs(a + 0.5 * h * k1, u, p);
  const Complex k3 = classical_rhs(a + 0.5 * h * k2, u, p);
  const Complex k4 = classical_rhs(a + h * k3, u, p);
  const Complex next = a + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!std::isfinite(next.real()) || !std::isfinite(next.imag()) || std::abs(next) > 1e150)
    throw NumericError("classical_kerr_step: trajectory diverged");
  return {next};
}

Eigen::Vector3d classical_observe(const ClassicalOscState& state) {
  return {state.a.real(), state.a.imag(), std::norm(state.a)};
}

ComplexMatrix kerr_hamiltonian(const KerrParams& p, double u) {
  p.validate();
  const ComplexMatrix a = destroy(p.n_max);
  const ComplexMatrix n = number(p.n_max);
  return p.K * n * n + p.gain * u * (a + a.adjoint());
}

Eigen::VectorXd kerr_features(const DensityMatrix& rho, bool include_populations) {
  const Index levels = rho.dim();
  const ComplexMatrix& m = rho.matrix();
  Complex mean_a(0.0);
  double mean_n = 0.0;
  for (Index k = 1; k < levels; ++k) mean_a += std::sqrt(static_cast<double>(k)) * m(k, k - 1);
  for (Index k = 0; k < levels; ++k) mean_n += static_cast<double>(k) * m(k, k).real();
  Eigen::VectorXd f(3 + (include_populations ? levels : 0));
  // X = (a + a^+)/sqrt2, P = -i(a - a^+)/sqrt2
  f[0] = std::sqrt(2.0) * mean_a.real();
  f[1] = std::sqrt(2.0) * mean_a.imag();
  f[2] = mean_n;
  if (include_populations) f.tail(levels) = rho.populations();
  return f;
}

void check_leakage(const DensityMatrix& rho, double tol, const std::vector<Index>& modes) {
  const Dims& dims = rho.dims();
  const Eigen::VectorXd p = rho.populations();
  for (std::size_t f = 0; f < dims.size(); ++f) {
    if (!modes.empty() && std::find(modes.begin(), modes.end(), static_cast<Index>(f)) == modes.end()) continue;
    const Index d = dims[f];
    const Index right = product(Dims(dims.begin() + static_cast<long>(f) + 1, dims.end()));
    double top = 0.0;
    for (Index k = 0; k < rho.dim(); ++k)
      if ((k / right) % d == d - 1) top += p[k];
    if (top > tol)
      throw NumericError("Fock truncation leakage: top level of mode " + std::to_string(f) + " holds " +
                         format_double(top) + " > " + format_double(tol) + "; increase n_max or lower the drive");
  }
}

KerrStepResult quantum_kerr_step(const DensityMatrix& rho, double u, const KerrParams& p) {
  p.validate();
  require(rho.dim() == p.n_max, "quantum_kerr_step: state dimension does not match n_max");
  check_leakage(rho, p.leakage_tol);
  const LindbladIntegrator lind(kerr_hamiltonian(p, u), {std::sqrt(p.kappa) * destroy(p.n_max)});
  check_step(p.dt, lind, "quantum_kerr_step");
  DensityMatrix next = lind.step(rho, p.dt);
  Eigen::VectorXd f = kerr_features(next, p.include_populations);
  return {std::move(next), std::move(f)};
}

ClassicalKerrReservoir::ClassicalKerrReservoir(const KerrParams& params) : params_(params) { params_.validate(); }

void ClassicalKerrReservoir::step(const Eigen::VectorXd& u) {
  require(u.size() == 1, "classical_kerr: expects a scalar input");
  for (Index s = 0; s < params_.steps_per_input; ++s) state_ = classical_kerr_step(state_, u[0], params_);
}

KerrReservoir::KerrReservoir(const KerrParams& params)
    : params_(params),
      h_kerr_(kerr_hamiltonian(params, 0.0)),
      h_drive_(params.gain * (destroy(params.n_max) + destroy(params.n_max).adjoint())),
      lindblad_(h_kerr_, {std::sqrt(params.kappa) * destroy(params.n_max)}),
      rho_(DensityMatrix::basis_state(0, {params.n_max})) {}

void KerrReservoir::reset() { rho_ = DensityMatrix::basis_state(0, {params_.n_max}); }

void KerrReservoir::set_state(const DensityMatrix& rho) {
  require(rho.dim() == params_.n_max, "KerrReservoir::set_state: dimension mismatch");
  rho_ = rho;
}

void KerrReservoir::step(const Eigen::VectorXd& u) {
  require(u.size() == 1, "kerr_qrc: expects a scalar input");
  lindblad_.set_hamiltonian(h_kerr_ + u[0] * h_drive_);
  check_step(params_.dt, lindblad_, "kerr_qrc");
  for (Index s = 0; s < params_.steps_per_input; ++s) rho_ = lindblad_.step(rho_, params_.dt);
  check_leakage(rho_, params_.leakage_tol);
}

CoupledKerrParams::CoupledKerrParams() {
  a.n_max = b.n_max = 9;
  a.K = b.K = 0.2;
  a.kappa = b.kappa = 0.3;
}

void CoupledKerrParams::validate() const {
  a.validate();
  b.validate();
  require(a.n_max * b.n_max <= kMaxHilbertDim, "coupled pair: n_max_a * n_max_b exceeds the Hilbert cap of 256");
  require(dt > 0.0 && steps_per_input >= 1, "coupled pair: dt must be > 0 and steps_per_input >= 1");
  require(std::isfinite(coupling), "coupled pair: coupling must be finite");
}

ComplexMatrix coupled_pair_hamiltonian(const CoupledKerrParams& p, double u) {
  p.validate();
  const Dims dims{p.a.n_max, p.b.n_max};
  const ComplexMatrix a = embed(destroy(p.a.n_max), 0, dims);
  const ComplexMatrix b = embed(destroy(p.b.n_max), 1, dims);
  const ComplexMatrix na = a.adjoint() * a;
  const ComplexMatrix nb = b.adjoint() * b;
  ComplexMatrix h = p.drive_freqs.first * na + p.a.K * na * na + p.drive_freqs.second * nb + p.b.K * nb * nb;
  h += p.coupling * (a.adjoint() * b + a * b.adjoint());
  h += u * (p.drive_amps.first * (a + a.adjoint()) + p.drive_amps.second * (b + b.adjoint()));
  return h;
}

CoupledKerrReservoir::CoupledKerrReservoir(const CoupledKerrParams& params)
    : params_(params),
      h_static_(coupled_pair_hamiltonian(params, 0.0)),
      h_drive_(coupled_pair_hamiltonian(params, 1.0) - h_static_),
      lindblad_(h_static_,
                {std::sqrt(params.a.kappa) * embed(destroy(params.a.n_max), 0, {params.a.n_max, params.b.n_max}),
                 std::sqrt(params.b.kappa) * embed(destroy(params.b.n_max), 1, {params.a.n_max, params.b.n_max})}),
      rho_(DensityMatrix::basis_state(0, {params.a.n_max, params.b.n_max})) {}

void CoupledKerrReservoir::reset() { rho_ = DensityMatrix::basis_state(0, {params_.a.n_max, params_.b.n_max}); }

void CoupledKerrReservoir::set_state(const DensityMatrix& rho) {
  require(rho.dims() == Dims{params_.a.n_max, params_.b.n_max}, "CoupledKerrReservoir::set_state: dims mismatch");
  rho_ = rho;
}

void CoupledKerrReservoir::evolve(double u, double duration) {
  lindblad_.set_hamiltonian(h_static_ + u * h_drive_);
  check_step(params_.dt, lindblad_, "coupled_kerr_qrc");
  const auto steps = static_cast<Index>(std::llround(duration / params_.dt));
  for (Index s = 0; s < steps; ++s) rho_ = lindblad_.step(rho_, params_.dt);
}

void CoupledKerrReservoir::step(const Eigen::VectorXd& u) {
  require(u.size() == 1, "coupled_kerr_qrc: expects a scalar input");
  evolve(u[0], params_.dt * static_cast<double>(params_.steps_per_input));
  check_leakage(rho_, std::max(params_.a.leakage_tol, params_.b.leakage_tol));
}

std::unique_ptr<Reservoir> build_coupled_pair(const CoupledKerrParams& p) {
  return std::make_unique<CoupledKerrReservoir>(p);
}

}  // namespace rclab::quantum
