#include <doctest.h>

#include <cmath>

#include "rclab/errors.hpp"
#include "rclab/esn.hpp"
#include "rclab/random.hpp"

using namespace rclab;

namespace {

// Orthogonal (subspace) iteration on W^T with Rayleigh-Ritz extraction; handles
// complex-conjugate dominant pairs that defeat single-vector power iteration.
double subspace_radius(const Eigen::MatrixXd& w, Index block = 16) {
  const Eigen::MatrixXd wt = w.transpose();
  Xoshiro256 rng(123);
  Eigen::MatrixXd q(w.rows(), block);
  for (Index i = 0; i < q.size(); ++i) q.data()[i] = rng.uniform(-1.0, 1.0);
  double last = -1.0;
  for (int it = 0; it < 20000; ++it) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(wt * q);
    q = qr.householderQ() * Eigen::MatrixXd::Identity(w.rows(), block);
    if (it % 20 == 19) {
      const Eigen::MatrixXd t = q.transpose() * wt * q;
      const double r = Eigen::EigenSolver<Eigen::MatrixXd>(t, false).eigenvalues().cwiseAbs().maxCoeff();
      if (std::abs(r - last) < 1e-13) return r;
      last = r;
    }
  }
  return last;
}

Eigen::VectorXd random_state(Index n, Xoshiro256& rng) {
  Eigen::VectorXd x(n);
  for (Index i = 0; i < n; ++i) x[i] = rng.uniform(-0.99, 0.99);
  return x;
}

}  // namespace

TEST_CASE("scalar reservoir has |W| equal to the spectral radius") {
  EsnParams p;
  p.nx = 1;
  p.density = 1.0;
  p.spectral_radius = 0.73;
  const EsnReservoir esn(p);
  CHECK(std::abs(esn.recurrent_weights()(0, 0)) == doctest::Approx(0.73).epsilon(1e-15));
}

TEST_CASE("construction is deterministic under a fixed seed") {
  EsnParams p;
  p.seed = 17;
  const EsnReservoir a(p), b(p);
  CHECK(a.input_weights() == b.input_weights());
  CHECK(a.recurrent_weights() == b.recurrent_weights());
  p.seed = 18;
  CHECK(EsnReservoir(p).recurrent_weights() != a.recurrent_weights());
}

TEST_CASE("weight ranges, density and spectral radius") {
  EsnParams p;
  p.seed = 4;
  const EsnReservoir esn(p);
  CHECK(esn.input_weights().cwiseAbs().maxCoeff() <= p.input_scale);
  const double fill = static_cast<double>((esn.recurrent_weights().array() != 0.0).count()) / 1e4;
  CHECK(fill == doctest::Approx(0.1).epsilon(0.2));
  CHECK(std::abs(subspace_radius(esn.recurrent_weights()) - 0.9) < 1e-6);
  CHECK(std::abs(spectral_radius(esn.recurrent_weights()) - 0.9) < 1e-10);
}

TEST_CASE("parameter validation") {
  EsnParams p;
  p.alpha = 0.0;
  CHECK_THROWS_AS(EsnReservoir{p}, ConfigError);
  p.alpha = 1.0;
  p.density = 1.5;
  CHECK_THROWS_AS(EsnReservoir{p}, ConfigError);
  p.density = 0.1;
  p.nx = 0;
  CHECK_THROWS_AS(EsnReservoir{p}, ConfigError);
}

TEST_CASE("update rule") {
  EsnParams p;
  p.nx = 1;
  SUBCASE("zero weights drive the state to zero") {
    p.alpha = 1.0;
    EsnReservoir esn(p, Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1));
    esn.set_state(Eigen::VectorXd::Constant(1, 0.7));
    esn.step(Eigen::VectorXd::Constant(1, 0.3));
    CHECK(esn.observe()(0) == 0.0);
  }
  SUBCASE("half leak with unit input weight") {
    p.alpha = 0.5;
    EsnReservoir esn(p, Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Zero(1, 1));
    esn.step(Eigen::VectorXd::Constant(1, 0.1));
    // 0.5 * tanh(0.1)
    CHECK(esn.observe()(0) == doctest::Approx(0.049833997312478).epsilon(1e-13));
  }
  SUBCASE("zero is a fixed point for every alpha") {
    for (double alpha : {0.1, 0.5, 1.0}) {
      EsnParams q;
      q.alpha = alpha;
      q.nx = 30;
      EsnReservoir esn(q);
      for (int k = 0; k < 10; ++k) esn.step(Eigen::VectorXd::Zero(1));
      CHECK(esn.observe().cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SUBCASE("dimension mismatch") {
    EsnReservoir esn(EsnParams{});
    CHECK_THROWS_AS(esn.step(Eigen::VectorXd::Zero(2)), ConfigError);
  }
}

TEST_CASE("alpha = 1 reduces to the pure tanh map") {
  Xoshiro256 rng(8);
  EsnParams p;
  p.nx = 40;
  p.alpha = 1.0;
  const EsnReservoir esn(p);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = random_state(40, rng);
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(1, rng.uniform(-1.0, 1.0));
    const Eigen::VectorXd leak = esn_update(x, u, esn.input_weights(), esn.recurrent_weights(), 1.0);
    const Eigen::VectorXd pure =
        (esn.input_weights() * u + esn.recurrent_weights() * x).array().tanh().matrix();
    CHECK((leak - pure).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("echo state property and boundedness") {
  Xoshiro256 rng(21);
  EsnParams p;
  p.seed = 2;
  EsnReservoir a(p), b(p);
  a.set_state(random_state(p.nx, rng));
  b.set_state(random_state(p.nx, rng));
  for (int n = 0; n < 500; ++n) {
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(1, rng.uniform(0.0, 0.5));
    a.step(u);
    b.step(u);
    CHECK(a.observe().cwiseAbs().maxCoeff() < 1.0);
  }
  CHECK((a.observe() - b.observe()).norm() < 1e-6);
}

TEST_CASE("leaky reservoir stays inside the open cube") {
  Xoshiro256 rng(5);
  EsnParams p;
  p.alpha = 0.3;
  p.spectral_radius = 1.5;
  p.input_scale = 3.0;
  EsnReservoir esn(p);
  esn.set_state(random_state(p.nx, rng));
  for (int n = 0; n < 300; ++n) {
    esn.step(Eigen::VectorXd::Constant(1, rng.uniform(-2.0, 2.0)));
    REQUIRE(esn.observe().cwiseAbs().maxCoeff() < 1.0);
  }
}
