#include <doctest.h>

#include <cmath>
#include <sstream>

#include "quantum_oracle.hpp"
#include "rclab/quantum/cavity.hpp"

using namespace rclab;
using namespace rclab::quantum;
using namespace rclab::testing;

namespace {

CavityQrcParams small_params() {
  CavityQrcParams p;
  p.n_max = 8;
  p.beta_scale = 0.3;
  p.dt = 0.05;
  p.steps_per_input = 20;
  return p;
}

// Sweep setting: the small step keeps RK4 positive up to g_z = 8.
CavityQrcParams zeno_params() {
  CavityQrcParams p = small_params();
  p.dt = 0.005;
  p.steps_per_input = 200;
  return p;
}

// Entry-by-entry assembly in the |n, sigma> basis, index 2 n + sigma.
ComplexMatrix hand_hamiltonian(const CavityQrcParams& p, double beta) {
  const Index d = p.dim();
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  auto idx = [](Index n, Index s) { return 2 * n + s; };
  for (Index n = 0; n <= p.n_max; ++n) {
    if (p.coupling == CavityCoupling::Printed) {
      h(idx(n, 0), idx(n, 0)) += p.g * static_cast<double>(n);
    } else if (n >= 1) {
      // a sigma_+ : |n-1, e><n, g| ;  a^+ sigma_- : |n, g><n-1, e|
      h(idx(n - 1, 1), idx(n, 0)) += p.g * std::sqrt(static_cast<double>(n));
      h(idx(n, 0), idx(n - 1, 1)) += p.g * std::sqrt(static_cast<double>(n));
    }
    for (Index s = 0; s < 2; ++s) {
      h(idx(n, s), idx(n, 1 - s)) += p.g_z;
      if (n >= 1) {
        // -i beta (a^+ - a)
        h(idx(n, s), idx(n - 1, s)) += Complex(0, -beta) * std::sqrt(static_cast<double>(n));
        h(idx(n - 1, s), idx(n, s)) += Complex(0, beta) * std::sqrt(static_cast<double>(n));
      }
    }
  }
  return h;
}

Eigen::VectorXd seeded_inputs(Index n, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  Eigen::VectorXd u(n);
  for (Index i = 0; i < n; ++i) u[i] = rng.uniform01();
  return u;
}

}  // namespace

TEST_CASE("cavity Hamiltonian") {
  CavityQrcParams p = small_params();
  SUBCASE("all couplings off") {
    p.g = p.g_z = 0.0;
    CHECK(build_cavity_hamiltonian(p, 0.0).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("matches hand assembly at n_max = 3") {
    p.n_max = 3;
    p.g = 0.7;
    p.g_z = 0.4;
    for (CavityCoupling c : {CavityCoupling::Printed, CavityCoupling::JaynesCummings}) {
      p.coupling = c;
      const ComplexMatrix h = build_cavity_hamiltonian(p, 0.35);
      REQUIRE(h.rows() == 8);
      CHECK((h - hand_hamiltonian(p, 0.35)).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
  SUBCASE("Hermitian for random drive strengths") {
    Xoshiro256 rng(1);
    for (int i = 0; i < 20; ++i) {
      const double beta = rng.uniform(-5.0, 5.0);
      CHECK(hermiticity_residual(build_cavity_hamiltonian(p, beta)) < 1e-10);
    }
  }
  SUBCASE("dimension cap") {
    p.n_max = 128;
    CHECK_THROWS_AS(build_cavity_hamiltonian(p, 0.0), ConfigError);
  }
}

TEST_CASE("cavity_step") {
  CavityQrcParams p = small_params();
  const Dims dims{p.n_max + 1, 2};
  SUBCASE("coherent displacement <n> = (beta t)^2") {
    p.g = p.g_z = p.kappa = 0.0;
    p.beta_scale = 1.0;
    p.dt = 0.001;
    p.steps_per_input = 10;
    const double beta = 0.5;
    DensityMatrix rho = DensityMatrix::basis_state(0, dims);
    for (int k = 1; k <= 60; ++k) {
      rho = cavity_step(rho, beta, p).rho;
      const double t = k * p.dt * p.steps_per_input;
      const double n = expectation(rho, kron(number(p.n_max + 1), identity(2))).real();
      CHECK(std::abs(n - std::pow(beta * t, 2)) < 1e-3);
    }
  }
  SUBCASE("vacuum ground state is stationary without input or atomic drive") {
    p.g_z = 0.0;
    const DensityMatrix rho0 = DensityMatrix::basis_state(0, dims);
    const CavityStepResult r = cavity_step(rho0, 0.0, p);
    CHECK((r.features - rho0.populations()).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("single photon decays as exp(-kappa t)") {
    p.g_z = 0.0;
    p.kappa = 0.8;
    p.dt = 0.01;
    p.steps_per_input = 10;
    DensityMatrix rho = DensityMatrix::basis_state(2 * 1 + 0, dims);
    for (int k = 1; k <= 50; ++k) {
      const CavityStepResult r = cavity_step(rho, 0.0, p);
      rho = r.rho;
      const double t = k * 0.1;
      CHECK(std::abs(r.features[2] + r.features[3] - std::exp(-p.kappa * t)) < 1e-4);
    }
  }
  SUBCASE("step-halving oracle at n_max = 8") {
    CavityQrcParams half = p;
    half.dt = p.dt / 2;
    half.steps_per_input = 2 * p.steps_per_input;
    const Eigen::VectorXd u = seeded_inputs(100, 6);
    DensityMatrix a = DensityMatrix::basis_state(0, dims), b = a;
    double worst = 0.0;
    for (Index k = 0; k < u.size(); ++k) {
      CavityStepResult ra = cavity_step(a, u[k], p);
      CavityStepResult rb = cavity_step(b, u[k], half);
      worst = std::max(worst, (ra.features - rb.features).cwiseAbs().maxCoeff());
      a = std::move(ra.rho);
      b = std::move(rb.rho);
    }
    CHECK(worst < 1e-6);
  }
  SUBCASE("leakage guard") {
    p.beta_scale = 5.0;
    p.n_max = 3;
    p.dt = 0.01;
    p.steps_per_input = 100;
    const CavityStepResult r = cavity_step(DensityMatrix::basis_state(0, {4, 2}), 1.0, p);
    CHECK_THROWS_AS(cavity_step(r.rho, 1.0, p), NumericError);
  }
}

TEST_CASE("Jaynes-Cummings variant shows vacuum Rabi oscillation") {
  CavityQrcParams p = small_params();
  p.coupling = CavityCoupling::JaynesCummings;
  p.g_z = p.kappa = 0.0;
  p.g = 0.5;
  p.dt = 0.005;
  p.steps_per_input = 20;
  DensityMatrix rho = DensityMatrix::basis_state(2 * 0 + 1, {p.n_max + 1, 2});
  for (int k = 1; k <= 30; ++k) {
    const CavityStepResult r = cavity_step(rho, 0.0, p);
    rho = r.rho;
    const double t = k * 0.1;
    CHECK(std::abs(r.features[2 * 1 + 0] - std::pow(std::sin(p.g * t), 2)) < 1e-8);
  }
}

TEST_CASE("cavity reservoir: normalization and state validity every step") {
  CavityReservoir res{CavityQrcParams{}};
  const Eigen::VectorXd u = seeded_inputs(100, 2);
  for (Index k = 0; k < u.size(); ++k) {
    res.step(u.segment(k, 1));
    const Eigen::VectorXd f = res.observe();
    CHECK(std::abs(f.sum() - 1.0) < 1e-6);
    CHECK(f.minCoeff() >= -1e-10);
    CHECK(f.maxCoeff() <= 1.0 + 1e-10);
    CHECK_NOTHROW(res.state().validate(1e-8, 1e-6, -1e-8));
  }
}

TEST_CASE("cavity reservoir: fading memory within 50/kappa") {
  const CavityQrcParams p;
  const double interval = p.dt * static_cast<double>(p.steps_per_input);
  const Index steps = static_cast<Index>(std::ceil(50.0 / p.kappa / interval));
  for (std::uint64_t seed : {3, 4}) {
    CavityReservoir a(p), b(p);
    b.set_state(DensityMatrix::basis_state(1, {p.n_max + 1, 2}));
    const Eigen::VectorXd u = seeded_inputs(steps, seed);
    for (Index k = 0; k < steps; ++k) {
      a.step(u.segment(k, 1));
      b.step(u.segment(k, 1));
    }
    CHECK((a.observe() - b.observe()).norm() < 1e-4);
  }
}

TEST_CASE("measurement modes") {
  const Eigen::VectorXd u = seeded_inputs(30, 8);
  SUBCASE("shots") {
    CavityQrcParams p = small_params();
    p.measurement = MeasurementMode::Shots;
    p.shots = 500;
    p.seed = 11;
    CavityReservoir shots(p);
    CavityQrcParams q = p;
    q.measurement = MeasurementMode::Ensemble;
    CavityReservoir exact(q);
    const TimeSeries in = TimeSeries::scalar(u);
    const Eigen::MatrixXd fs = drive(shots, in);
    const Eigen::MatrixXd fe = drive(exact, in);
    CHECK(fs == drive(shots, in));
    for (Index k = 0; k < fs.rows(); ++k) {
      CHECK(std::abs(fs.row(k).sum() - 1.0) < 1e-12);
      for (Index j = 0; j < fs.cols(); ++j) {
        const double c = fs(k, j) * p.shots;
        CHECK(std::abs(c - std::round(c)) < 1e-9);
      }
    }
    // Shot noise of a frequency is at most 0.5/sqrt(M); allow five sigma.
    CHECK((fs - fe).cwiseAbs().maxCoeff() < 5 * 0.5 / std::sqrt(500.0));
  }
  SUBCASE("rewind replays the most recent window from the initial state") {
    CavityQrcParams p = small_params();
    p.measurement = MeasurementMode::Rewind;
    p.rewind_window = 4;
    CavityReservoir rw(p);
    const Eigen::MatrixXd f = drive(rw, TimeSeries::scalar(u));
    CavityQrcParams q = p;
    q.measurement = MeasurementMode::Ensemble;
    for (Index k : {2, 10, 29}) {
      CavityReservoir fresh(q);
      for (Index j = std::max<Index>(0, k - 3); j <= k; ++j) fresh.step(u.segment(j, 1));
      CHECK((f.row(k).transpose() - fresh.observe()).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
  SUBCASE("sample_frequencies of a point mass") {
    Xoshiro256 rng(1);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(4);
    p[2] = 1.0;
    CHECK(sample_frequencies(p, 100, rng) == p);
  }
}

TEST_CASE("cavity reservoir: positivity at the strongest sweep drive") {
  CavityQrcParams p = zeno_params();
  p.g_z = 8.0;
  CavityReservoir res(p);
  const Eigen::VectorXd u = seeded_inputs(100, 9);
  double worst = 0.0;
  for (Index k = 0; k < u.size(); ++k) {
    res.step(u.segment(k, 1));
    worst = std::min(worst, res.state().min_eigenvalue());
  }
  CHECK(worst > -1e-8);
}

TEST_CASE("zeno sweep") {
  CavityQrcParams p = zeno_params();
  const TaskData task = gen_memory_task(400, 2, 5);
  const SplitPlan split = plan_split(400);
  SUBCASE("repeated value is deterministic and g_z = 0 is a valid row") {
    const auto rows = zeno_sweep(p, {0.0, 0.7, 0.7}, task, split);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].test_nmse == rows[2].test_nmse);
    CHECK(rows[1].train_nmse == rows[2].train_nmse);
    CHECK(std::isfinite(rows[0].test_nmse));
    CHECK(rows[0].g_z == 0.0);
  }
  SUBCASE("threaded evaluation gives the sequential table") {
    const std::vector<double> gz{0.1, 0.5, 1.0, 2.0};
    const auto seq = zeno_sweep(p, gz, task, split, 1);
    const auto par = zeno_sweep(p, gz, task, split, 3);
    std::ostringstream a, b;
    write_zeno_csv(a, seq);
    write_zeno_csv(b, par);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("g_z,train_nmse,test_nmse,seed\n", 0) == 0);
  }
  SUBCASE("needs two points") { CHECK_THROWS_AS(zeno_sweep(p, {1.0}, task, split), ConfigError); }
}

TEST_CASE("zeno sweep regression lock on the delay-2 memory task") {
  // Frozen from the first run of this configuration.
  const CavityQrcParams p = zeno_params();
  const TaskData task = gen_memory_task(600, 2, 7);
  const auto rows = zeno_sweep(p, {0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}, task, plan_split(600));
  const double expected[8] = {0.989258289509245,  0.6688015031735955, 0.5602802659182632, 0.6062699773388665,
                              0.6963447287606556, 0.7781803278711646, 0.792696181659332,  0.792350163516458};
  REQUIRE(rows.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) CHECK(rows[i].test_nmse == doctest::Approx(expected[i]).epsilon(1e-9));
}
