#include "rclab/physical/bubble.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

#include <unsupported/Eigen/FFT>

#include "rclab/errors.hpp"
#include "rclab/format.hpp"
#include "rclab/parallel.hpp"
#include "rclab/random.hpp"

namespace rclab::physical {

namespace {

constexpr double kTwoPi = 6.283185307179586;

// Keller-Miksis in the form D R'' = N, where the coupling pressure (if any)
// is added by the caller to the (1 + Rdot/c)(p_L - p_inf)/rho term.
struct KmTerms {
  double numerator;
  double denominator;
  double coupling_factor;  // (1 + Rdot/c) / rho
};

KmTerms km_terms(const BubbleParams& p, double r0, double R, double Rdot, double p_a, double p_a_dot) {
  const double c = p.sound_speed, rho = p.density, mu = p.viscosity, sigma = p.surface_tension;
  const double pg0 = p.ambient_pressure + 2.0 * sigma / r0;
  const double pg = pg0 * std::pow(r0 / R, 3.0 * p.polytropic);
  const double pg_dot = -3.0 * p.polytropic * pg * Rdot / R;
  // p_L - p_inf without the viscous R'' contribution to its time derivative.
  const double diff = pg - 2.0 * sigma / R - 4.0 * mu * Rdot / R - p.ambient_pressure - p_a;
  const double diff_dot = pg_dot + 2.0 * sigma * Rdot / (R * R) + 4.0 * mu * Rdot * Rdot / (R * R) - p_a_dot;
  const double num = (1.0 + Rdot / c) * diff / rho + R * diff_dot / (rho * c) -
                     1.5 * (1.0 - Rdot / (3.0 * c)) * Rdot * Rdot;
  const double den = (1.0 - Rdot / c) * R + 4.0 * mu / (rho * c);
  return {num, den, (1.0 + Rdot / c) / rho};
}

void check_state(const Eigen::VectorXd& r, const Eigen::VectorXd& rdot, const Eigen::VectorXd& r0, double c,
                 double pressure) {
  for (Index i = 0; i < r.size(); ++i)
    if (!std::isfinite(r[i]) || !std::isfinite(rdot[i]) || r[i] < 1e-3 * r0[i] || std::abs(rdot[i]) >= c)
      throw NumericError("bubble collapse singularity at drive pressure " + format_double(pressure / 1e3) +
                         " kPa (R/R0 = " + format_double(r[i] / r0[i]) + ")");
}

// Drives a set of radial states with p_a(t) = -P sin(omega t). `accel` maps
// (R, Rdot, p_a, p_a_dot) to R''.
template <typename Accel>
class RadialIntegrator {
 public:
  RadialIntegrator(Accel accel, Eigen::VectorXd r0, double omega, double c, const BubbleIntegration& integ)
      : accel_(std::move(accel)), r0_(std::move(r0)), omega_(omega), c_(c), integ_(integ) {}

  // Advances (r, rdot) from t over `span` seconds at amplitude P.
  void advance(Eigen::VectorXd& r, Eigen::VectorXd& rdot, double t, double span, double pressure) const {
    Index n = integ_.min_substeps;
    for (Index attempt = 0;; ++attempt) {
      Eigen::VectorXd r1 = r, v1 = rdot, r2 = r, v2 = rdot;
      const bool ok1 = run(r1, v1, t, span, n, pressure);
      const bool ok2 = ok1 && run(r2, v2, t, span, 2 * n, pressure);
      if (ok2) {
        const double err = ((r1 - r2).array() / r0_.array()).abs().maxCoeff();
        if (err <= integ_.rel_tol) {
          r = std::move(r2);
          rdot = std::move(v2);
          check_state(r, rdot, r0_, c_, pressure);
          return;
        }
      }
      if (attempt >= integ_.max_halvings) {
        if (ok2) check_state(r2, v2, r0_, c_, pressure);
        throw NumericError("bubble integration did not converge at drive pressure " + format_double(pressure / 1e3) +
                           " kPa; the trajectory is too violent for this model");
      }
      n *= 2;
    }
  }

  Eigen::VectorXd acceleration(const Eigen::VectorXd& r, const Eigen::VectorXd& rdot, double t,
                               double pressure) const {
    return accel_(r, rdot, -pressure * std::sin(omega_ * t), -pressure * omega_ * std::cos(omega_ * t));
  }

 private:
  bool run(Eigen::VectorXd& r, Eigen::VectorXd& v, double t, double span, Index n, double pressure) const {
    const double h = span / static_cast<double>(n);
    for (Index s = 0; s < n; ++s) {
      const double ts = t + h * static_cast<double>(s);
      const Eigen::VectorXd a1 = acceleration(r, v, ts, pressure);
      const Eigen::VectorXd r2 = r + 0.5 * h * v, v2 = v + 0.5 * h * a1;
      if (!valid(r2, v2)) return false;
      const Eigen::VectorXd a2 = acceleration(r2, v2, ts + 0.5 * h, pressure);
      const Eigen::VectorXd r3 = r + 0.5 * h * v2, v3 = v + 0.5 * h * a2;
      if (!valid(r3, v3)) return false;
      const Eigen::VectorXd a3 = acceleration(r3, v3, ts + 0.5 * h, pressure);
      const Eigen::VectorXd r4 = r + h * v3, v4 = v + h * a3;
      if (!valid(r4, v4)) return false;
      const Eigen::VectorXd a4 = acceleration(r4, v4, ts + h, pressure);
      r += (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4);
      v += (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
      if (!valid(r, v)) return false;
    }
    return true;
  }

  bool valid(const Eigen::VectorXd& r, const Eigen::VectorXd& v) const {
    return r.allFinite() && v.allFinite() && (r.array() > 1e-4 * r0_.array()).all() &&
           (v.array().abs() < c_).all();
  }

  Accel accel_;
  Eigen::VectorXd r0_;
  double omega_;
  double c_;
  BubbleIntegration integ_;
};

}  // namespace

void BubbleParams::validate() const {
  require(R0 >= 1e-6 && R0 <= 1e-3, "bubble: R0 must lie in [1e-6, 1e-3] m");
  require(f_drive > 0 && density > 0 && viscosity > 0 && surface_tension > 0 && ambient_pressure > 0 &&
              polytropic > 0 && sound_speed > 0,
          "bubble: all physical parameters must be positive");
}

BubbleParams macro_bubble_preset() {
  BubbleParams p;
  p.R0 = 1e-3;
  p.f_drive = 6.6e3;
  return p;
}

double keller_miksis_acceleration(const BubbleParams& p, const RadialState& s, double p_a, double p_a_dot) {
  const KmTerms t = km_terms(p, p.R0, s.R, s.Rdot, p_a, p_a_dot);
  return t.numerator / t.denominator;
}

LinearizedBubble linearize(const BubbleParams& p) {
  p.validate();
  const double rho = p.density, c = p.sound_speed, mu = p.viscosity, r0 = p.R0;
  const double pg0 = p.ambient_pressure + 2.0 * p.surface_tension / r0;
  const double stiffness = 3.0 * p.polytropic * pg0 - 2.0 * p.surface_tension / r0;
  return {r0 * r0 + 4.0 * mu * r0 / (rho * c), 4.0 * mu / rho + r0 * stiffness / (rho * c), stiffness / rho};
}

double LinearizedBubble::natural_frequency() const { return std::sqrt(k / m) / kTwoPi; }

double linear_response_magnitude(const BubbleParams& p, double f) {
  const LinearizedBubble lin = linearize(p);
  const double w = kTwoPi * f;
  // m r'' + b r' + k r = -R0 (p_a + R0 p_a' / c) / rho
  const std::complex<double> forcing = p.R0 * std::complex<double>(1.0, w * p.R0 / p.sound_speed) / p.density;
  const std::complex<double> denom(lin.k - lin.m * w * w, lin.b * w);
  return std::abs(forcing / denom);
}

TimeSeries bubble_radius_trajectory(const BubbleParams& p, double peak_pressure, Index cycles,
                                    const BubbleIntegration& integ) {
  p.validate();
  require(peak_pressure >= 0.0 && std::isfinite(peak_pressure), "bubble: peak pressure must be >= 0");
  require(cycles >= 16, "bubble: need at least 16 drive cycles");
  require(integ.samples_per_cycle >= 64, "bubble: need at least 64 samples per cycle");
  const double omega = kTwoPi * p.f_drive;
  auto accel = [&p](const Eigen::VectorXd& r, const Eigen::VectorXd& v, double pa, double pa_dot) {
    const KmTerms t = km_terms(p, p.R0, r[0], v[0], pa, pa_dot);
    return Eigen::VectorXd::Constant(1, t.numerator / t.denominator);
  };
  const RadialIntegrator<decltype(accel)> integrator(accel, Eigen::VectorXd::Constant(1, p.R0), omega,
                                                     p.sound_speed, integ);
  const Index samples = cycles * integ.samples_per_cycle;
  const double dt = 1.0 / (p.f_drive * static_cast<double>(integ.samples_per_cycle));
  Eigen::MatrixXd out(3, samples);
  Eigen::VectorXd r = Eigen::VectorXd::Constant(1, p.R0), v = Eigen::VectorXd::Zero(1);
  for (Index k = 0; k < samples; ++k) {
    const double t = dt * static_cast<double>(k);
    if (k > 0) integrator.advance(r, v, t - dt, dt, peak_pressure);
    out(0, k) = r[0];
    out(1, k) = v[0];
    out(2, k) = integrator.acceleration(r, v, t, peak_pressure)[0];
  }
  return TimeSeries(std::move(out), dt);
}

Eigen::VectorXd volume_acceleration(const TimeSeries& trajectory) {
  require(trajectory.channels() == 3, "volume_acceleration: expects rows R, Rdot, R''");
  const auto& m = trajectory.values();
  const Eigen::ArrayXd R = m.row(0).transpose(), V = m.row(1).transpose(), A = m.row(2).transpose();
  return (2.0 * kTwoPi * (2.0 * R * V.square() + R.square() * A)).matrix();
}

std::string to_string(SpectrumClass c) {
  switch (c) {
    case SpectrumClass::HarmonicsOnly: return "harmonics";
    case SpectrumClass::Subharmonic: return "subharmonic";
    case SpectrumClass::Comb: return "comb";
    case SpectrumClass::Other: return "other";
  }
  return "other";
}

Eigen::VectorXd spectrum_db(const Eigen::VectorXd& signal, Index cycles, Index max_bin) {
  const Index n = signal.size();
  require(n >= 8 && cycles >= 1, "spectrum_db: signal too short");
  require(max_bin < n / 2, "spectrum_db: max_bin beyond Nyquist");
  std::vector<double> windowed(static_cast<std::size_t>(n));
  const double mean = signal.mean();
  for (Index k = 0; k < n; ++k) {
    const double hann = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n));
    windowed[static_cast<std::size_t>(k)] = hann * (signal[k] - mean);
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, windowed);
  Eigen::VectorXd mag(max_bin + 1);
  for (Index k = 0; k <= max_bin; ++k) mag[k] = std::abs(spec[static_cast<std::size_t>(k)]);
  mag[0] = 0.0;
  const double peak = mag.maxCoeff();
  Eigen::VectorXd db(max_bin + 1);
  for (Index k = 0; k <= max_bin; ++k)
    db[k] = (peak > 0.0 && mag[k] > 0.0) ? std::max(-300.0, 20.0 * std::log10(mag[k] / peak)) : -300.0;
  return db;
}

double SpectrumMap::level_at(Index row, double q) const {
  const auto k = static_cast<Index>(std::llround(q * static_cast<double>(bins_per_harmonic)));
  require(k >= 0 && k < db.cols(), "SpectrumMap::level_at: order outside the map");
  double best = -300.0;
  for (Index j = std::max<Index>(0, k - 1); j <= std::min<Index>(db.cols() - 1, k + 1); ++j)
    best = std::max(best, db(row, j));
  return best;
}

std::vector<double> SpectrumMap::half_integer_peaks(Index row, double threshold_db, double max_order) const {
  std::vector<double> out;
  const double top = std::min(max_order, bins[bins.size() - 1]);
  for (double q = 0.5; q < top; q += 1.0)
    if (level_at(row, q) > threshold_db) out.push_back(q);
  return out;
}

SpectrumClass SpectrumMap::classify(Index row, double threshold_db) const {
  const std::vector<double> halves = half_integer_peaks(row, threshold_db);
  if (halves.empty()) return SpectrumClass::HarmonicsOnly;
  if (halves.size() >= 6) return SpectrumClass::Comb;
  const bool sub = level_at(row, 0.5) > threshold_db && level_at(row, 1.5) > threshold_db;
  return sub ? SpectrumClass::Subharmonic : SpectrumClass::Other;
}

void SpectrumMap::write_csv(std::ostream& os) const {
  os << "pressure_kPa";
  for (Index k = 0; k < bins.size(); ++k) os << ',' << format_double(bins[k]);
  os << '\n';
  for (Index r = 0; r < db.rows(); ++r) {
    os << format_double(pressures[static_cast<std::size_t>(r)] / 1e3);
    for (Index k = 0; k < db.cols(); ++k) os << ',' << format_double(db(r, k));
    os << '\n';
  }
}

void SpectrumMap::write_pgm(std::ostream& os, double floor_db) const {
  os << "P5\n" << db.cols() << ' ' << db.rows() << "\n255\n";
  // Highest pressure on top, as in a map with pressure increasing upwards.
  for (Index r = db.rows() - 1; r >= 0; --r)
    for (Index k = 0; k < db.cols(); ++k) {
      const double level = std::clamp(db(r, k), floor_db, 0.0);
      os.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (1.0 - level / floor_db)))));
    }
}

SpectrumMap bubble_spectrum_map(const BubbleParams& p, const std::vector<double>& pressures, Index cycles,
                                const SpectrumOptions& opts) {
  require(pressures.size() >= 2, "bubble_spectrum_map: need at least two pressures");
  require(cycles >= 16, "bubble_spectrum_map: need at least 16 cycles");
  // Steady-state window: the second half, trimmed to an even cycle count so
  // half-integer orders fall on exact bins.
  Index window = cycles / 2;
  window -= window % 2;
  const Index spc = opts.integration.samples_per_cycle;
  const auto max_bin = static_cast<Index>(std::floor(opts.max_order * static_cast<double>(window)));
  require(opts.max_order < 0.5 * static_cast<double>(spc), "bubble_spectrum_map: max_order beyond Nyquist");

  SpectrumMap map;
  map.pressures = pressures;
  map.bins_per_harmonic = window;
  map.bins = Eigen::VectorXd::LinSpaced(max_bin + 1, 0.0, static_cast<double>(max_bin) / static_cast<double>(window));
  map.db.resize(static_cast<Index>(pressures.size()), max_bin + 1);
  parallel_for(pressures.size(), opts.threads, [&](std::size_t i) {
    const TimeSeries traj = bubble_radius_trajectory(p, pressures[i], cycles, opts.integration);
    const Eigen::VectorXd proxy = volume_acceleration(traj);
    const Index len = window * spc;
    map.db.row(static_cast<Index>(i)) = spectrum_db(proxy.tail(len), window, max_bin).transpose();
  });
  return map;
}

CascadeSummary summarize_cascade(const SpectrumMap& map, double threshold_db) {
  CascadeSummary s;
  const Index rows = map.db.rows();
  std::vector<SpectrumClass> cls(static_cast<std::size_t>(rows));
  for (Index r = 0; r < rows; ++r) cls[static_cast<std::size_t>(r)] = map.classify(r, threshold_db);
  auto at = [&](Index r) { return cls[static_cast<std::size_t>(r)]; };

  // Onset is the first row where f/2 crosses the threshold. Near the period
  // doubling f/2 grows before 3/2 does, so a few rows may classify as Other
  // between the harmonic rows and the first full subharmonic row.
  Index onset = -1;
  for (Index r = 0; r < rows && onset < 0; ++r)
    if (map.level_at(r, 0.5) > threshold_db) onset = r;
  for (Index r = std::max<Index>(onset, 0); r < rows && s.first_subharmonic < 0; ++r)
    if (at(r) == SpectrumClass::Subharmonic) s.first_subharmonic = r;
  for (Index r = std::max<Index>(s.first_subharmonic, 0); r < rows && s.first_comb < 0; ++r)
    if (at(r) == SpectrumClass::Comb) s.first_comb = r;
  if (onset < 0) return s;
  s.onset_pressure = map.pressures[static_cast<std::size_t>(onset)];
  s.onset_stable = onset + 2 < rows && map.level_at(onset + 1, 0.5) > threshold_db &&
                   map.level_at(onset + 2, 0.5) > threshold_db;

  bool ordered = onset > 0 && s.first_subharmonic >= 0 && s.first_comb > s.first_subharmonic;
  for (Index r = 0; r < onset && ordered; ++r) ordered = at(r) == SpectrumClass::HarmonicsOnly;
  for (Index r = onset; r < rows && ordered; ++r) ordered = at(r) != SpectrumClass::HarmonicsOnly;
  s.ordered = ordered;
  return s;
}

// ---------------------------------------------------------------------------

void BubbleClusterParams::validate() const {
  require(!radii.empty(), "bubble cluster: need at least one bubble");
  require(radii.size() == positions.size(), "bubble cluster: radii and positions differ in length");
  for (double r : radii) require(r >= 1e-6 && r <= 1e-3, "bubble cluster: radii must lie in [1e-6, 1e-3] m");
  for (std::size_t i = 0; i < radii.size(); ++i)
    for (std::size_t j = i + 1; j < radii.size(); ++j) {
      double d2 = 0.0;
      for (int k = 0; k < 3; ++k) d2 += std::pow(positions[i][k] - positions[j][k], 2);
      require(std::sqrt(d2) > radii[i] + radii[j],
              "bubble cluster: bubbles " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
    }
  require(bias_pressure >= 0.0 && std::isfinite(input_gain), "bubble cluster: invalid drive amplitude");
  require(cycles_per_input >= 1, "bubble cluster: cycles_per_input must be >= 1");
}

BubbleClusterParams BubbleClusterParams::random(Index n, double r0, double spread, double extent,
                                                std::uint64_t seed) {
  require(n >= 1, "bubble cluster: need at least one bubble");
  Xoshiro256 rng(seed);
  BubbleClusterParams p;
  Index guard = 0;
  while (static_cast<Index>(p.radii.size()) < n) {
    require(++guard < 100000, "bubble cluster: could not place non-overlapping bubbles; enlarge `extent`");
    const double r = r0 * (1.0 + rng.uniform(-spread, spread));
    const std::array<double, 3> x{rng.uniform(0, extent), rng.uniform(0, extent), rng.uniform(0, extent)};
    bool clear = true;
    for (std::size_t j = 0; j < p.radii.size() && clear; ++j) {
      double d2 = 0.0;
      for (int k = 0; k < 3; ++k) d2 += std::pow(x[k] - p.positions[j][k], 2);
      // Keep a margin well beyond contact so oscillating bubbles stay apart.
      clear = std::sqrt(d2) > 5.0 * (r + p.radii[j]);
    }
    if (!clear) continue;
    p.radii.push_back(r);
    p.positions.push_back(x);
  }
  return p;
}

BubbleClusterReservoir::BubbleClusterReservoir(BubbleClusterParams cluster, BubbleParams drive,
                                               BubbleIntegration integ)
    : cluster_(std::move(cluster)), drive_(drive), integ_(integ) {
  cluster_.validate();
  drive_.validate();
  const Index n = static_cast<Index>(cluster_.radii.size());
  inv_distance_ = Eigen::MatrixXd::Zero(n, n);
  if (cluster_.coupling)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        if (i == j) continue;
        double d2 = 0.0;
        for (int k = 0; k < 3; ++k) d2 += std::pow(cluster_.positions[i][k] - cluster_.positions[j][k], 2);
        inv_distance_(i, j) = 1.0 / std::sqrt(d2);
      }
  reset();
}

void BubbleClusterReservoir::reset() {
  r_ = Eigen::Map<const Eigen::VectorXd>(cluster_.radii.data(), static_cast<Index>(cluster_.radii.size()));
  rdot_ = Eigen::VectorXd::Zero(r_.size());
  t_ = 0.0;
}

Eigen::VectorXd BubbleClusterReservoir::accelerations(const Eigen::VectorXd& r, const Eigen::VectorXd& rdot,
                                                      double p_a, double p_a_dot) const {
  const Index n = r.size();
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs(n);
  for (Index i = 0; i < n; ++i) {
    const KmTerms t = km_terms(drive_, cluster_.radii[static_cast<std::size_t>(i)], r[i], rdot[i], p_a, p_a_dot);
    lhs(i, i) = t.denominator;
    rhs[i] = t.numerator;
    // Radiated pressure of bubble j at i: rho (R_j^2 R_j'' + 2 R_j Rdot_j^2) / d_ij.
    for (Index j = 0; j < n; ++j) {
      if (inv_distance_(i, j) == 0.0) continue;
      const double w = t.coupling_factor * drive_.density * inv_distance_(i, j);
      lhs(i, j) += w * r[j] * r[j];
      rhs[i] -= w * 2.0 * r[j] * rdot[j] * rdot[j];
    }
  }
  if (n == 1) return Eigen::VectorXd::Constant(1, rhs[0] / lhs(0, 0));
  return lhs.partialPivLu().solve(rhs);
}

void BubbleClusterReservoir::step(const Eigen::VectorXd& u) {
  require(u.size() == 1, "bubble_cluster: expects a scalar input");
  const double pressure = std::max(0.0, cluster_.bias_pressure + cluster_.input_gain * u[0]);
  const double omega = kTwoPi * drive_.f_drive;
  auto accel = [this](const Eigen::VectorXd& r, const Eigen::VectorXd& v, double pa, double pa_dot) {
    return accelerations(r, v, pa, pa_dot);
  };
  const Eigen::VectorXd r0 =
      Eigen::Map<const Eigen::VectorXd>(cluster_.radii.data(), static_cast<Index>(cluster_.radii.size()));
  const RadialIntegrator<decltype(accel)> integrator(accel, r0, omega, drive_.sound_speed, integ_);
  const double dt = 1.0 / (drive_.f_drive * static_cast<double>(integ_.samples_per_cycle));
  const Index samples = cluster_.cycles_per_input * integ_.samples_per_cycle;
  for (Index k = 0; k < samples; ++k) {
    integrator.advance(r_, rdot_, t_, dt, pressure);
    t_ += dt;
  }
}

Eigen::VectorXd BubbleClusterReservoir::observe() const {
  const Index n = r_.size();
  const double omega = kTwoPi * drive_.f_drive;
  Eigen::VectorXd f(2 * n);
  for (Index i = 0; i < n; ++i) {
    const double r0 = cluster_.radii[static_cast<std::size_t>(i)];
    f[2 * i] = (r_[i] - r0) / r0;
    f[2 * i + 1] = rdot_[i] / (r0 * omega);
  }
  return f;
}

std::unique_ptr<Reservoir> build_bubble_cluster_reservoir(const BubbleClusterParams& p, const BubbleParams& drive) {
  return std::make_unique<BubbleClusterReservoir>(p, drive);
}

}  // namespace rclab::physical
