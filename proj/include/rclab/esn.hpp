#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "rclab/reservoir.hpp"

namespace rclab {

struct EsnParams {
  Index nx = 100;
  Index nu = 1;
  double alpha = 1.0;  // leaking rate, (0, 1]
  double spectral_radius = 0.9;
  double input_scale = 0.5;
  double density = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

// x' = (1 - alpha) x + alpha tanh(W_in u + W x)
template <typename DerivedX, typename DerivedU, typename DerivedIn, typename DerivedW>
auto esn_update(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedU>& u,
                const Eigen::MatrixBase<DerivedIn>& w_in, const Eigen::MatrixBase<DerivedW>& w,
                typename DerivedX::Scalar alpha) {
  using Scalar = typename DerivedX::Scalar;
  return ((Scalar(1) - alpha) * x.array() + alpha * (w_in * u + w * x).array().tanh()).matrix().eval();
}

// Largest eigenvalue modulus, from the full (Hessenberg-QR) spectrum.
double spectral_radius(const Eigen::MatrixXd& w);

class EsnReservoir final : public Reservoir {
 public:
  // Draws W_in (row-major, uniform in [-input_scale, input_scale]) then W
  // (row-major; each entry kept with probability `density`, uniform in
  // [-1, 1]) from one xoshiro256** stream, and rescales W to the requested
  // spectral radius.
  explicit EsnReservoir(const EsnParams& params);
  EsnReservoir(const EsnParams& params, Eigen::MatrixXd w_in, Eigen::MatrixXd w);

  void reset() override { x_.setZero(); }
  void step(const Eigen::VectorXd& u) override;
  Eigen::VectorXd observe() const override { return x_; }
  Index input_width() const override { return params_.nu; }
  Index feature_width() const override { return params_.nx; }
  std::string name() const override { return "esn"; }

  void set_state(const Eigen::VectorXd& x);
  const Eigen::MatrixXd& input_weights() const { return w_in_; }
  const Eigen::MatrixXd& recurrent_weights() const { return w_; }
  const EsnParams& params() const { return params_; }

 private:
  EsnParams params_;
  Eigen::MatrixXd w_in_;
  Eigen::MatrixXd w_;
  Eigen::VectorXd x_;
};

}  // namespace rclab
