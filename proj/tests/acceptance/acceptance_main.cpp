// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "quantum_oracle.hpp"
#include "rclab/esn.hpp"
#include "rclab/harness/experiment.hpp"
#include "rclab/physical/bubble.hpp"
#include "rclab/physical/whisker.hpp"
#include "rclab/quantum/cavity.hpp"
#include "rclab/quantum/oscillator.hpp"
#include "rclab/quantum/spin.hpp"
#include "rclab/readout.hpp"
#include "readout_oracle.hpp"

using namespace rclab;
using namespace rclab::quantum;
using namespace rclab::physical;
using namespace rclab::harness;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a sub-check; the criterion passes only if all of them do.
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

unsigned g_threads = 1;
fs::path g_workdir;

Config shipped_config(const std::string& name) {
  for (const auto& e : bench_suite())
    if (e.name == name) return Config::parse(e.text, name);
  throw std::runtime_error("no shipped config named " + name);
}

std::string g(double v, int precision = 3) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------

void readout_correctness(Outcome& o) {
  const auto t0 = Clock::now();
  Xoshiro256 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Index rows = 4 + (196 * i) / 49;  // 4 .. 200
    const Index cols = 10 * rows;           // 40 .. 2000
    const Eigen::MatrixXd x = testing::random_matrix(rows, cols, rng);
    const Eigen::MatrixXd y = testing::random_matrix(1 + i % 3, cols, rng);
    const double beta = i % 2 == 0 ? 1e-6 : default_beta(x);
    const ReadoutModel m = train_ridge(x, y, beta, 1);
    worst = std::max(worst, (m.weights() - testing::svd_ridge(x, y, beta)).cwiseAbs().maxCoeff());
  }
  const double t = seconds_since(t0);
  o.check(worst < 1e-8, "max |dW| < 1e-8");
  o.check(t < 10.0, "runtime < 10 s");
  o.detail << "50 instances up to 200x2000, max |W - W_svd| = " << g(worst) << ", " << g(t) << " s";
}

void esn_echo_state(Outcome& o) {
  const auto t0 = Clock::now();
  EsnParams p;
  p.seed = 5;
  EsnReservoir a(p), b(p);
  Xoshiro256 rng(77);
  Eigen::VectorXd xa(p.nx), xb(p.nx);
  for (Index i = 0; i < p.nx; ++i) {
    xa[i] = rng.uniform(-1.0, 1.0);
    xb[i] = rng.uniform(-1.0, 1.0);
  }
  a.set_state(xa);
  b.set_state(xb);
  const double d0 = (xa - xb).norm();
  for (int n = 0; n < 500; ++n) {
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(1, rng.uniform(0.0, 0.5));
    a.step(u);
    b.step(u);
  }
  const double d = (a.observe() - b.observe()).norm();
  const double t = seconds_since(t0);
  o.check(p.nx == 100 && p.spectral_radius == 0.9, "default N = 100, rho = 0.9");
  o.check(d < 1e-6, "terminal distance < 1e-6");
  o.check(t < 1.0, "runtime < 1 s");
  o.detail << "initial distance " << g(d0) << ", after 500 steps " << g(d) << ", " << g(t) << " s";
}

void esn_narma(Outcome& o) {
  const auto t0 = Clock::now();
  const ExperimentConfig e = resolve_experiment(shipped_config("esn_narma10"));
  const RunReport r = run_experiment(e);
  const double t = seconds_since(t0);
  o.check(r.feature_width == 100, "N = 100");
  o.check(e.task.kind == "narma" && e.task.order == 10, "NARMA-10 task");
  o.check(r.test.nmse < 0.25, "test NMSE < 0.25");
  o.check(t < 30.0, "runtime < 30 s");
  o.detail << "seed " << r.seed << ", test NMSE " << g(r.test.nmse, 4) << ", " << g(t) << " s";
}

// Replays the exact input of a shipped run and checks the state after every step.
struct StateStats {
  double trace = 0.0, herm = 0.0, min_eig = 0.0;
  Index steps = 0;
};

template <typename R>
void track_states(const ExperimentConfig& e, StateStats& s) {
  std::unique_ptr<Reservoir> base = make_reservoir(e);
  auto* res = dynamic_cast<R*>(base.get());
  if (!res) throw std::runtime_error("unexpected reservoir type for " + e.resolved.origin());
  const TaskData task = experiment_task(e);
  res->reset();
  const Eigen::MatrixXd& u = task.input.values();
  for (Index t = 0; t < u.cols(); ++t) {
    res->step(u.col(t));
    const DensityMatrix& rho = res->state();
    s.trace = std::max(s.trace, std::abs(rho.trace() - 1.0));
    s.herm = std::max(s.herm, rho.hermiticity_residual());
    s.min_eig = std::min(s.min_eig, rho.min_eigenvalue());
    ++s.steps;
  }
}

void quantum_conservation(Outcome& o) {
  const auto t0 = Clock::now();
  StateStats s;
  Index trajectories = 0;
  track_states<SpinReservoir>(resolve_experiment(shipped_config("spin_memory")), s);
  ++trajectories;
  Config kd = shipped_config("kerr_dissipation");
  for (double kappa : std::get<std::vector<double>>(*kd.find("sweep.values"))) {
    kd.set("reservoir.kappa", kappa);
    track_states<KerrReservoir>(resolve_experiment(kd), s);
    ++trajectories;
  }
  track_states<KerrReservoir>(resolve_experiment(shipped_config("kerr_sine_phase")), s);
  track_states<CoupledKerrReservoir>(resolve_experiment(shipped_config("coupled_parity")), s);
  trajectories += 2;
  Config cz = shipped_config("cavity_zeno");
  for (double gz : std::get<std::vector<double>>(*cz.find("sweep.values"))) {
    cz.set("reservoir.g_z", gz);
    track_states<CavityReservoir>(resolve_experiment(cz), s);
    ++trajectories;
  }
  o.check(s.trace < 1e-6, "|tr rho - 1| < 1e-6");
  o.check(s.herm < 1e-8, "Hermiticity residual < 1e-8");
  o.check(s.min_eig > -1e-8, "min eigenvalue > -1e-8");

  // Amplitude damping of |n0> : <n>(t) = n0 exp(-kappa t).
  const Index levels = 10, n0 = 4;
  const double kappa = 0.5, t_end = 3.0 / kappa;
  const LindbladIntegrator lind(ComplexMatrix::Zero(levels, levels), {std::sqrt(kappa) * destroy(levels)});
  DensityMatrix rho = DensityMatrix::basis_state(n0, {levels});
  const int steps = 6000;
  for (int k = 0; k < steps; ++k) rho = lind.step(rho, t_end / steps);
  const double n = expectation(rho, number(levels)).real();
  const double exact = n0 * std::exp(-kappa * t_end);
  const double rel = std::abs(n - exact) / exact;
  o.check(rel < 1e-4, "amplitude damping within 1e-4 relative");
  o.detail << trajectories << " shipped trajectories, " << s.steps << " states: max |tr-1| " << g(s.trace)
           << ", max herm " << g(s.herm) << ", min eig " << g(s.min_eig) << "; damping rel err " << g(rel)
           << " at t = 3/kappa, " << g(seconds_since(t0)) << " s";
}

void partial_trace_identities(Outcome& o) {
  Xoshiro256 rng(12);
  double worst = 0.0;
  auto track = [&](const ComplexMatrix& a, const ComplexMatrix& b) {
    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
  };
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix ra = testing::random_density(2 + trial % 3, rng);
    const ComplexMatrix rb = testing::random_density(2 + trial % 4, rng);
    const ComplexMatrix rc = testing::random_density(2, rng);
    const Index da = ra.rows(), db = rb.rows();
    const DensityMatrix ab(kron(ra, rb), {da, db});
    track(partial_trace(ab, 0).matrix(), rb);
    track(partial_trace(ab, 1).matrix(), ra);
    const DensityMatrix abc(kron(kron(ra, rb), rc), {da, db, 2});
    track(partial_trace(abc, 0).matrix(), kron(rb, rc));
    track(partial_trace(abc, 1).matrix(), kron(ra, rc));
    track(partial_trace(abc, 2).matrix(), kron(ra, rb));
  }
  const double product_worst = worst;
  worst = 0.0;
  const double h = 1.0 / std::sqrt(2.0);
  for (int variant = 0; variant < 4; ++variant) {
    ComplexVector bell = ComplexVector::Zero(4);
    if (variant < 2) {
      bell(0) = h;
      bell(3) = variant == 0 ? h : -h;
    } else {
      bell(1) = h;
      bell(2) = variant == 2 ? h : -h;
    }
    const DensityMatrix phi = DensityMatrix::pure(bell, {2, 2});
    for (Index f : {0, 1}) track(partial_trace(phi, f).matrix(), 0.5 * identity(2));
  }
  o.check(product_worst < 1e-12, "product states to 1e-12");
  o.check(worst < 1e-12, "Bell states to 1e-12");
  o.detail << "product states max err " << g(product_worst) << ", Bell states max err " << g(worst);
}

// Pair-loop Ising Hamiltonian from embedded Pauli matrices.
ComplexMatrix ising_oracle(const SpinQrcParams& p) {
  const Dims dims(p.n_qubits, 2);
  ComplexMatrix h = ComplexMatrix::Zero(product(dims), product(dims));
  Xoshiro256 rng(p.seed);
  for (Index i = 0; i < p.n_qubits; ++i)
    for (Index j = i + 1; j < p.n_qubits; ++j) {
      const double jij = p.couplings == CouplingMode::Uniform ? p.coupling
                                                              : rng.uniform(-p.coupling / 2, p.coupling / 2);
      h += jij * embed(sigma_x(), i, dims) * embed(sigma_x(), j, dims);
    }
  for (Index i = 0; i < p.n_qubits; ++i) h += p.field * embed(sigma_z(), i, dims);
  return h;
}

void spin_qrc(Outcome& o) {
  SpinQrcParams p;
  p.n_qubits = 3;
  p.seed = 31;
  p.dt = 4.0;
  p.virtual_nodes = 4;
  SpinReservoir res(p);
  const Dims dims{2, 2, 2};
  const ComplexMatrix h = ising_oracle(p);
  // Composed oracle: trace out qubit 0, tensor in the encoded input, evolve
  // each sub-interval with a Taylor propagator, read sigma_z per site.
  ComplexMatrix rho = ComplexMatrix::Zero(8, 8);
  rho(0, 0) = 1.0;
  double worst = 0.0;
  const double inputs[] = {0.37, 0.81, 0.05};
  for (double s : inputs) {
    res.step(Eigen::VectorXd::Constant(1, s));
    ComplexMatrix in(2, 2);
    in << 1.0 - s, std::sqrt(s * (1.0 - s)), std::sqrt(s * (1.0 - s)), s;
    rho = kron(in, partial_trace(rho, dims, 0));
    Eigen::VectorXd expected(3 * p.virtual_nodes);
    for (Index v = 0; v < p.virtual_nodes; ++v) {
      rho = testing::evolve_by_series(rho, h, p.dt / static_cast<double>(p.virtual_nodes));
      for (Index i = 0; i < 3; ++i)
        expected[3 * v + i] = expectation(DensityMatrix(rho, dims), embed(sigma_z(), i, dims)).real();
    }
    worst = std::max(worst, (res.observe() - expected).cwiseAbs().maxCoeff());
  }
  o.check(worst < 1e-9, "N = 3 end-to-end output vs oracle < 1e-9");

  ComplexMatrix d0 = ComplexMatrix::Zero(2, 2), d1 = ComplexMatrix::Zero(2, 2);
  d0(0, 0) = 1.0;
  d1(1, 1) = 1.0;
  const bool exact = encode_input(0.0) == d0 && encode_input(1.0) == d1;
  o.check(exact, "encode_input endpoints exact");

  const auto t0 = Clock::now();
  SpinQrcParams big;
  big.n_qubits = 4;
  big.virtual_nodes = 4;
  big.seed = 3;
  SpinReservoir r4(big);
  Xoshiro256 rng(4);
  for (int n = 0; n < 200; ++n) r4.step(Eigen::VectorXd::Constant(1, rng.uniform01()));
  const double t = seconds_since(t0);
  o.check(t < 60.0, "200-step N = 4, V = 4 run < 60 s");
  o.check(r4.observe().size() == 16 && r4.observe().allFinite(), "16 finite features");
  o.detail << "max |f - f_oracle| " << g(worst) << " over 3 steps, endpoints exact: " << (exact ? "yes" : "no")
           << ", 200 steps N=4 V=4 in " << g(t) << " s";
}

void kerr_correspondence(Outcome& o) {
  KerrParams p;
  p.K = 0.0;
  p.kappa = 0.5;
  p.gain = 0.3;
  p.n_max = 20;
  p.dt = 0.01;
  DensityMatrix rho = DensityMatrix::basis_state(0, {p.n_max});
  ClassicalOscState c;
  const int steps = static_cast<int>(std::lround(10.0 / p.kappa / p.dt));
  double worst = 0.0;
  Xoshiro256 rng(8);
  double u = 0.0;
  for (int s = 0; s < steps; ++s) {
    if (s % 50 == 0) u = rng.uniform(0.0, 1.0);
    KerrStepResult r = quantum_kerr_step(rho, u, p);
    rho = std::move(r.rho);
    c = classical_kerr_step(c, u, p);
    const Complex a(r.features[0] / std::sqrt(2.0), r.features[1] / std::sqrt(2.0));
    worst = std::max(worst, std::abs(a - c.a));
  }
  o.check(worst < 1e-6, "K = 0 <a> vs classical < 1e-6 over 10 lifetimes");

  const auto t0 = Clock::now();
  const ExperimentConfig e = resolve_experiment(shipped_config("coupled_parity"));
  const auto& cp = std::get<CoupledKerrParams>(e.reservoir);
  const RunReport r = run_experiment(e);
  const double t = seconds_since(t0);
  o.check(cp.a.n_max == 9 && cp.b.n_max == 9, "cutoffs 9 x 9");
  o.check(r.feature_width == 81, "81 features");
  o.check(e.task.kind == "delayed_parity" && std::isfinite(r.test.nmse), "delayed parity trains");
  o.check(t < 300.0, "pipeline < 5 min");
  o.detail << "max |<a>_q - a_cl| " << g(worst) << "; coupled pair " << r.feature_width
           << " features, parity test accuracy " << g(r.test.accuracy.value_or(NAN)) << ", " << g(t) << " s";
}

void dissipation_property(Outcome& o) {
  Config c = shipped_config("kerr_dissipation");
  c.erase("sweep.axis");
  c.erase("sweep.values");
  SweepSpec spec;
  spec.axis = "reservoir.kappa";
  spec.values = {0.2, 2.0};
  const ExperimentConfig e = resolve_experiment(c);
  const SweepResult s = run_sweep(c, spec, g_threads);
  const double lo = s.reports[0].test.nmse, hi = s.reports[1].test.nmse;
  o.check(e.task.kind == "memory" && e.task.delay == 1, "delay-1 memory task");
  o.check(hi > lo, "NMSE(kappa = 2) > NMSE(kappa = 0.2)");
  o.detail << "seed " << s.reports[0].seed << ": test NMSE " << g(lo, 4) << " at kappa=0.2, " << g(hi, 4)
           << " at kappa=2";
}

void cavity_qrc(Outcome& o) {
  double worst_norm = 0.0;
  {
    CavityReservoir res{CavityQrcParams{}};
    Xoshiro256 rng(2);
    for (int k = 0; k < 200; ++k) {
      res.step(Eigen::VectorXd::Constant(1, rng.uniform01()));
      worst_norm = std::max(worst_norm, std::abs(res.observe().sum() - 1.0));
    }
  }
  o.check(worst_norm < 1e-6, "sum P(n, sigma) = 1 +- 1e-6");

  double worst_decay = 0.0;
  {
    CavityQrcParams p;
    p.n_max = 8;
    p.g_z = 0.0;
    p.kappa = 0.8;
    p.dt = 0.01;
    p.steps_per_input = 10;
    DensityMatrix rho = DensityMatrix::basis_state(2 * 1 + 0, {p.n_max + 1, 2});
    for (int k = 1; k <= 60; ++k) {
      const CavityStepResult r = cavity_step(rho, 0.0, p);
      rho = r.rho;
      const double n = expectation(rho, kron(number(p.n_max + 1), identity(2))).real();
      worst_decay = std::max(worst_decay, std::abs(n - std::exp(-p.kappa * k * 0.1)));
    }
  }
  o.check(worst_decay < 1e-4, "photon decay within 1e-4 of exp(-kappa t)");

  double memory_gap = 0.0;
  {
    const CavityQrcParams p;
    const double interval = p.dt * static_cast<double>(p.steps_per_input);
    const Index steps = static_cast<Index>(std::ceil(50.0 / p.kappa / interval));
    CavityReservoir a(p), b(p);
    b.set_state(DensityMatrix::basis_state(1, {p.n_max + 1, 2}));
    Xoshiro256 rng(3);
    for (Index k = 0; k < steps; ++k) {
      const Eigen::VectorXd u = Eigen::VectorXd::Constant(1, rng.uniform01());
      a.step(u);
      b.step(u);
    }
    memory_gap = (a.observe() - b.observe()).norm();
  }
  o.check(memory_gap < 1e-4, "fading memory < 1e-4 within 50/kappa");

  const auto t0 = Clock::now();
  const Config cz = shipped_config("cavity_zeno");
  const SweepResult s = run_sweep(cz, resolve_sweep(cz), g_threads);
  const double t = seconds_since(t0);
  const auto& cp = std::get<CavityQrcParams>(resolve_experiment(cz).reservoir);
  o.check(s.zeno.has_value() && s.zeno->size() == 8, "8-point g_z sweep");
  o.check(cp.n_max == 8, "n_max = 8");
  o.check(t < 600.0, "sweep < 10 min");
  o.detail << "norm err " << g(worst_norm) << ", decay err " << g(worst_decay) << ", memory gap " << g(memory_gap)
           << " at 50/kappa, 8-point g_z sweep " << g(t) << " s";
}

void bubble_cascade(Outcome& o) {
  const auto t0 = Clock::now();
  const SpectraSpec spec = resolve_spectra(shipped_config("bubble_spectra"));
  const SpectraResult r = run_spectra(spec, g_threads);
  const double t = seconds_since(t0);
  const SpectrumMap& m = r.map;
  const double thr = -40.0;
  // Independent scan of the map: first harmonics-only row, then the first
  // later row with 1/2 and 3/2 above threshold, then the first later row with
  // at least six half-integer peaks.
  const Index rows = static_cast<Index>(m.pressures.size());
  Index harmonic = -1, sub = -1, comb = -1;
  for (Index i = 0; i < rows; ++i) {
    if (harmonic < 0) {
      if (m.half_integer_peaks(i, thr, 8.0).empty()) harmonic = i;
    } else if (sub < 0) {
      if (m.level_at(i, 0.5) > thr && m.level_at(i, 1.5) > thr) sub = i;
    } else if (comb < 0) {
      if (m.half_integer_peaks(i, thr, 8.0).size() >= 6) comb = i;
    }
  }
  o.check(rows == 200, "200-point sweep");
  o.check(harmonic >= 0 && sub > harmonic && comb > sub, "harmonics-only, then 1/2 + 3/2, then comb");
  o.check(r.summary.ordered, "no harmonics-only row after the onset");
  o.check(t < 300.0, "sweep < 5 min");
  auto kpa = [&](Index i) { return i < 0 ? std::string("none") : g(m.pressures[i] / 1e3, 4) + " kPa"; };
  o.detail << "harmonics-only at " << kpa(harmonic) << ", 1/2 and 3/2 at " << kpa(sub) << ", comb at " << kpa(comb)
           << ", f/2 onset " << g(r.summary.onset_pressure / 1e3, 4) << " kPa, " << g(t) << " s";
}

void whisker_modes(Outcome& o) {
  WhiskerParams p;
  p.cubic = 0.0;
  const Eigen::VectorXd w = whisker_modal_frequencies(p);
  const double cut = 0.5 * (w[0] + w[1]);
  const double ts = p.dt * static_cast<double>(p.steps_per_input);
  WhiskerReservoir r(p);
  Xoshiro256 rng(1);
  const Index n = 4096;
  Eigen::VectorXd base(n), tip(n);
  for (Index t = 0; t < n; ++t) {
    r.step(Eigen::VectorXd::Constant(1, 0.01 * rng.uniform(-1.0, 1.0)));
    const Eigen::VectorXd f = r.observe();
    base[t] = f[0];
    tip[t] = f[2];
  }
  const double fb = spectral_energy_fraction_above(base, ts, cut);
  const double ft = spectral_energy_fraction_above(tip, ts, cut);
  o.check(ft > fb, "tip fraction > base fraction");
  o.detail << "energy above (w1+w2)/2 = " << g(cut) << " rad/s: tip " << g(ft) << ", base " << g(fb);
}

// Reads a file, dropping the wall_time_s column of CSVs that have one.
std::string normalized(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  if (path.extension() != ".csv") return text;
  std::istringstream lines(text);
  std::string line, out;
  int drop = -1;
  bool header = true;
  while (std::getline(lines, line)) {
    std::vector<std::string> fields;
    std::stringstream fs_(line);
    std::string f;
    while (std::getline(fs_, f, ',')) fields.push_back(f);
    if (header) {
      for (std::size_t i = 0; i < fields.size(); ++i)
        if (fields[i] == "wall_time_s") drop = static_cast<int>(i);
      header = false;
    }
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (static_cast<int>(i) != drop) out += fields[i] + ",";
    out += "\n";
  }
  return out;
}

void reproducibility(Outcome& o) {
  const auto t0 = Clock::now();
  const fs::path a = g_workdir / "bench_a", b = g_workdir / "bench_b";
  fs::remove_all(a);
  fs::remove_all(b);
  run_bench(a, g_threads);
  run_bench(b, g_threads);
  Index files = 0, differing = 0;
  std::string first_diff;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    ++files;
    if (!fs::exists(b / rel) || normalized(entry.path()) != normalized(b / rel)) {
      ++differing;
      if (first_diff.empty()) first_diff = rel.string();
    }
  }
  Index files_b = 0;
  for (const auto& entry : fs::recursive_directory_iterator(b))
    if (entry.is_regular_file()) ++files_b;
  o.check(files > 0 && files == files_b, "same file set");
  o.check(differing == 0, "identical contents apart from wall_time_s" +
                              (first_diff.empty() ? std::string() : " (first: " + first_diff + ")"));
  o.detail << bench_suite().size() << " configs, " << files << " files compared, " << differing
           << " differ, two invocations in " << g(seconds_since(t0)) << " s";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rclab acceptance suite"};
  std::string workdir = (fs::temp_directory_path() / "rclab_acceptance").string();
  std::vector<int> only;
  app.add_option("--workdir", workdir, "scratch directory for bench outputs");
  app.add_option("--threads", g_threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);
  g_workdir = workdir;
  fs::create_directories(g_workdir);

  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"readout correctness", readout_correctness},
      {"ESN echo-state property", esn_echo_state},
      {"ESN NARMA-10 benchmark", esn_narma},
      {"quantum kernel conservation", quantum_conservation},
      {"partial-trace identities", partial_trace_identities},
      {"spin QRC", spin_qrc},
      {"Kerr correspondence and coupled pair", kerr_correspondence},
      {"dissipation property", dissipation_property},
      {"cavity QRC", cavity_qrc},
      {"bubble cascade", bubble_cascade},
      {"whisker mode separation", whisker_modes},
      {"bench reproducibility", reproducibility},
  };
  // Lines go to stdout and to <workdir>/acceptance.txt.
  std::ofstream log(g_workdir / "acceptance.txt");
  auto emit = [&](const std::string& line) {
    std::cout << line << std::endl;
    log << line << "\n";
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "]";
    }
    if (!o.pass) ++failed;
    emit(std::string(o.pass ? "PASS" : "FAIL") + "  " + std::to_string(id) + ". " + criteria[i].first + ": " +
         o.detail.str());
  }
  emit(failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed");
  return failed;
}
