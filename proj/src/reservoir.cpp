#include "rclab/reservoir.hpp"

#include "rclab/errors.hpp"

namespace rclab {

Eigen::MatrixXd drive(Reservoir& reservoir, const TimeSeries& input) {
  require(input.channels() == reservoir.input_width(),
          reservoir.name() + ": input has " + std::to_string(input.channels()) + " channels, expected " +
              std::to_string(reservoir.input_width()));
  reservoir.reset();
  Eigen::MatrixXd features(input.steps(), reservoir.feature_width());
  for (Index n = 0; n < input.steps(); ++n) {
    reservoir.step(input.at(n));
    features.row(n) = reservoir.observe().transpose();
  }
  return features;
}

}  // namespace rclab
