#include "rclab/physical/whisker.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "rclab/errors.hpp"
#include "rclab/format.hpp"

namespace rclab::physical {

void WhiskerParams::validate() const {
  require(n_masses >= 6, "whisker: n_masses must be >= 6");
  require(taper > 0.0 && taper <= 1.0, "whisker: taper must lie in (0, 1]");
  require(mass_taper > 0.0 && mass_taper <= 1.0, "whisker: mass_taper must lie in (0, 1]");
  require(base_stiffness > 0.0 && mass > 0.0, "whisker: stiffness and mass must be positive");
  require(cubic >= 0.0 && damping >= 0.0, "whisker: cubic and damping must be >= 0");
  require(dt > 0.0 && steps_per_input >= 1, "whisker: dt must be > 0 and steps_per_input >= 1");
  require(probes[0] >= 0 && probes[0] < probes[1] && probes[1] < probes[2] && probes[2] < n_masses,
          "whisker: probes must be strictly increasing indices below n_masses");
  require(instability_bound > 0.0, "whisker: instability_bound must be positive");
}

std::array<Index, 3> WhiskerParams::default_probes(Index n) { return {1, n / 2, n - 1}; }

Eigen::VectorXd whisker_stiffness(const WhiskerParams& p) {
  Eigen::VectorXd k(p.n_masses);
  for (Index i = 0; i < p.n_masses; ++i) k[i] = p.base_stiffness * std::pow(p.taper, static_cast<double>(i));
  return k;
}

Eigen::VectorXd whisker_masses(const WhiskerParams& p) {
  Eigen::VectorXd m(p.n_masses);
  for (Index i = 0; i < p.n_masses; ++i) m[i] = p.mass * std::pow(p.mass_taper, static_cast<double>(i));
  return m;
}

Eigen::VectorXd whisker_modal_frequencies(const WhiskerParams& p) {
  p.validate();
  const Eigen::VectorXd k = whisker_stiffness(p), m = whisker_masses(p);
  const Index n = p.n_masses;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    K(i, i) += k[i];
    if (i + 1 < n) {
      K(i, i) += k[i + 1];
      K(i, i + 1) -= k[i + 1];
      K(i + 1, i) -= k[i + 1];
    }
  }
  const Eigen::VectorXd s = m.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd A = s.asDiagonal() * K * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}

double whisker_memory_horizon(const WhiskerParams& p) {
  require(p.damping > 0.0, "whisker: memory horizon needs damping > 0");
  return std::log(1e6) / (0.5 * p.damping);
}

double spectral_energy_fraction_above(const Eigen::VectorXd& signal, double sample_dt, double omega_cut) {
  const Index n = signal.size();
  require(n >= 16 && sample_dt > 0.0, "spectral_energy_fraction_above: signal too short");
  std::vector<double> w(static_cast<std::size_t>(n));
  const double mean = signal.mean();
  for (Index k = 0; k < n; ++k)
    w[static_cast<std::size_t>(k)] =
        (0.5 - 0.5 * std::cos(6.283185307179586 * static_cast<double>(k) / static_cast<double>(n))) *
        (signal[k] - mean);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, w);
  double total = 0.0, above = 0.0;
  for (Index k = 1; k <= n / 2; ++k) {
    const double omega = 6.283185307179586 * static_cast<double>(k) / (static_cast<double>(n) * sample_dt);
    const double e = std::norm(spec[static_cast<std::size_t>(k)]);
    total += e;
    if (omega > omega_cut) above += e;
  }
  require(total > 0.0, "spectral_energy_fraction_above: signal is constant");
  return above / total;
}

WhiskerReservoir::WhiskerReservoir(const WhiskerParams& params) : params_(params) {
  params_.validate();
  k_ = whisker_stiffness(params_);
  m_ = whisker_masses(params_);
  const double w_max = whisker_modal_frequencies(params_).maxCoeff();
  require(params_.dt * w_max < 2.5, "whisker: dt = " + format_double(params_.dt) +
                                        " exceeds the RK4 stability limit " + format_double(2.5 / w_max) +
                                        " of the stiffest mode");
  reset();
}

void WhiskerReservoir::reset() {
  x_ = Eigen::VectorXd::Zero(params_.n_masses);
  v_ = Eigen::VectorXd::Zero(params_.n_masses);
}

Eigen::VectorXd WhiskerReservoir::acceleration(const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                                               double base) const {
  const Index n = x.size();
  Eigen::VectorXd spring(n);  // tension in spring i
  for (Index i = 0; i < n; ++i) {
    const double d = x[i] - (i == 0 ? base : x[i - 1]);
    spring[i] = k_[i] * (d + params_.cubic * d * d * d);
  }
  Eigen::VectorXd a(n);
  for (Index i = 0; i < n; ++i) {
    const double f = -spring[i] + (i + 1 < n ? spring[i + 1] : 0.0);
    a[i] = f / m_[i] - params_.damping * v[i];
  }
  return a;
}

void WhiskerReservoir::step(const Eigen::VectorXd& u) {
  require(u.size() == 1, "whisker: expects a scalar input");
  const double b = u[0], h = params_.dt;
  for (Index s = 0; s < params_.steps_per_input; ++s) {
    const Eigen::VectorXd a1 = acceleration(x_, v_, b);
    const Eigen::VectorXd x2 = x_ + 0.5 * h * v_, v2 = v_ + 0.5 * h * a1;
    const Eigen::VectorXd a2 = acceleration(x2, v2, b);
    const Eigen::VectorXd x3 = x_ + 0.5 * h * v2, v3 = v_ + 0.5 * h * a2;
    const Eigen::VectorXd a3 = acceleration(x3, v3, b);
    const Eigen::VectorXd x4 = x_ + h * v3, v4 = v_ + h * a3;
    const Eigen::VectorXd a4 = acceleration(x4, v4, b);
    x_ += (h / 6.0) * (v_ + 2.0 * v2 + 2.0 * v3 + v4);
    v_ += (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    if (!x_.allFinite() || !v_.allFinite() || x_.cwiseAbs().maxCoeff() > params_.instability_bound)
      throw NumericError("whisker: displacement became unbounded; use a smaller dt, more damping or a "
                         "smaller input");
  }
}

Eigen::VectorXd WhiskerReservoir::observe() const {
  Eigen::VectorXd f(6);
  for (int j = 0; j < 3; ++j) {
    f[j] = x_[params_.probes[j]];
    f[3 + j] = v_[params_.probes[j]];
  }
  return f;
}

std::unique_ptr<Reservoir> build_whisker_reservoir(const WhiskerParams& p) {
  return std::make_unique<WhiskerReservoir>(p);
}

}  // namespace rclab::physical
