#include "rclab/esn.hpp"

#include <cmath>

#include "rclab/errors.hpp"
#include "rclab/format.hpp"
#include "rclab/random.hpp"

namespace rclab {

void EsnParams::validate() const {
  require(nx >= 1, "esn: nx must be >= 1");
  require(nu >= 1, "esn: nu must be >= 1");
  require(alpha > 0.0 && alpha <= 1.0, "esn: alpha must lie in (0, 1]");
  require(density > 0.0 && density <= 1.0, "esn: density must lie in (0, 1]");
  require(spectral_radius > 0.0, "esn: spectral_radius must be > 0");
  require(input_scale > 0.0, "esn: input_scale must be > 0");
}

double spectral_radius(const Eigen::MatrixXd& w) {
  if (w.size() == 1) return std::abs(w(0, 0));
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(w, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericError("spectral_radius: eigenvalue iteration did not converge");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

EsnReservoir::EsnReservoir(const EsnParams& params) : params_(params) {
  params_.validate();
  Xoshiro256 rng(params_.seed);
  w_in_.resize(params_.nx, params_.nu);
  for (Index i = 0; i < params_.nx; ++i)
    for (Index j = 0; j < params_.nu; ++j) w_in_(i, j) = rng.uniform(-params_.input_scale, params_.input_scale);

  w_ = Eigen::MatrixXd::Zero(params_.nx, params_.nx);
  for (Index i = 0; i < params_.nx; ++i)
    for (Index j = 0; j < params_.nx; ++j)
      if (rng.bernoulli(params_.density)) w_(i, j) = rng.uniform(-1.0, 1.0);

  const double radius = spectral_radius(w_);
  // Nilpotent or empty draws cannot be rescaled.
  if (!(radius > 1e-8 * std::max(1.0, w_.norm())))
    throw NumericError("esn: recurrent matrix has spectral radius " + format_double(radius) +
                       "; raise density or change seed");
  w_ *= params_.spectral_radius / radius;
  x_ = Eigen::VectorXd::Zero(params_.nx);
}

EsnReservoir::EsnReservoir(const EsnParams& params, Eigen::MatrixXd w_in, Eigen::MatrixXd w)
    : params_(params), w_in_(std::move(w_in)), w_(std::move(w)) {
  require(params_.alpha > 0.0 && params_.alpha <= 1.0, "esn: alpha must lie in (0, 1]");
  require(w_.rows() == w_.cols() && w_in_.rows() == w_.rows(), "esn: inconsistent weight shapes");
  params_.nx = w_.rows();
  params_.nu = w_in_.cols();
  x_ = Eigen::VectorXd::Zero(params_.nx);
}

void EsnReservoir::step(const Eigen::VectorXd& u) {
  require(u.size() == params_.nu, "esn: input dimension mismatch");
  x_ = esn_update(x_, u, w_in_, w_, params_.alpha);
}

void EsnReservoir::set_state(const Eigen::VectorXd& x) {
  require(x.size() == params_.nx, "esn: state dimension mismatch");
  x_ = x;
}

}  // namespace rclab
