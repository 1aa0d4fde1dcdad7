#pragma once

#include <memory>
#include <string>

#include <Eigen/Dense>

#include "rclab/timeseries.hpp"

namespace rclab {

/// Common surface of every reservoir back-end: a driven dynamical system whose
/// observed state after each input is the feature vector handed to the readout.
class Reservoir {
 public:
  virtual ~Reservoir() = default;

  virtual void reset() = 0;
  virtual void step(const Eigen::VectorXd& u) = 0;
  virtual Eigen::VectorXd observe() const = 0;

  virtual Index input_width() const = 0;
  virtual Index feature_width() const = 0;
  virtual std::string name() const = 0;
};

// Resets the reservoir, drives it with every step of `input`, and returns the
// observed features as a steps x feature_width matrix.
Eigen::MatrixXd drive(Reservoir& reservoir, const TimeSeries& input);

}  // namespace rclab
