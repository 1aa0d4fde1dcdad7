#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rclab/timeseries.hpp"

namespace rclab {

// Columns are time steps; rows are [1; u_n; x_n].
using StateMatrix = Eigen::MatrixXd;

/// Trained linear readout y_n = W_out [1; u_n; x_n].
///
/// W_out is N_y x (1 + N_u + N_x): targets are rows-by-time, exactly like the
/// state matrix, so training solves Y = W_out X in the least-squares sense.
class ReadoutModel {
 public:
  ReadoutModel(Eigen::MatrixXd w_out, double beta, Index input_width);

  const Eigen::MatrixXd& weights() const { return w_out_; }
  double beta() const { return beta_; }
  Index input_width() const { return input_width_; }
  Index state_width() const { return w_out_.cols() - 1 - input_width_; }
  Index output_width() const { return w_out_.rows(); }

  void save(std::ostream& os) const;
  static ReadoutModel load(std::istream& is);

 private:
  Eigen::MatrixXd w_out_;
  double beta_;
  Index input_width_;
};

// states: one row per time step (the layout reservoirs emit).
StateMatrix assemble_state_matrix(const TimeSeries& inputs, const Eigen::MatrixXd& states);

// 1e-8 * trace(X X^T) / rows.
double default_beta(const StateMatrix& x);

// First 10% of steps, capped at 200.
Index default_washout(Index steps);

/// Ridge solution W_out = Y X^T (X X^T + beta I)^{-1}, computed by a Cholesky
/// solve of (X X^T + beta I) W_out^T = X Y^T. beta = 0 is accepted only when
/// X X^T is numerically nonsingular.
ReadoutModel train_ridge(const StateMatrix& x, const Eigen::MatrixXd& y_target, double beta,
                         Index input_width);

TimeSeries predict(const ReadoutModel& model, const TimeSeries& inputs, const Eigen::MatrixXd& states);
Eigen::MatrixXd predict(const ReadoutModel& model, const StateMatrix& x);

}  // namespace rclab
