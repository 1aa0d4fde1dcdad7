#include "rclab/pipeline.hpp"

#include <cmath>

#include "rclab/errors.hpp"

namespace rclab {

SplitPlan plan_split(Index steps, double train_fraction, std::optional<Index> washout) {
  require(train_fraction > 0.0 && train_fraction < 1.0, "plan_split: train_fraction must lie in (0, 1)");
  SplitPlan plan;
  plan.washout = washout.value_or(default_washout(steps));
  require(plan.washout >= 0 && plan.washout < steps, "plan_split: washout must be smaller than the run");
  const Index usable = steps - plan.washout;
  plan.train = static_cast<Index>(std::floor(train_fraction * static_cast<double>(usable)));
  plan.test = usable - plan.train;
  require(plan.train >= 2 && plan.test >= 2, "plan_split: too few steps for a train/test split");
  return plan;
}

Evaluation fit_readout(const TimeSeries& input, const Eigen::MatrixXd& features, const TimeSeries& target,
                       const SplitPlan& split, std::optional<double> beta) {
  require(features.rows() == input.steps() && target.steps() == input.steps(),
          "fit_readout: input, features and target lengths differ");
  require(split.washout + split.train + split.test <= input.steps(), "fit_readout: split exceeds the run");
  const Index test_begin = split.washout + split.train;
  const StateMatrix x_train =
      assemble_state_matrix(input.slice(split.washout, split.train), features.middleRows(split.washout, split.train));
  const StateMatrix x_test =
      assemble_state_matrix(input.slice(test_begin, split.test), features.middleRows(test_begin, split.test));
  const double b = beta.value_or(default_beta(x_train));
  const TimeSeries y_train = target.slice(split.washout, split.train);
  const TimeSeries y_test = target.slice(test_begin, split.test);
  ReadoutModel model = train_ridge(x_train, y_train.values(), b, input.channels());
  TimeSeries p_train(predict(model, x_train), target.dt());
  TimeSeries p_test(predict(model, x_test), target.dt());
  const double train_nmse = nmse(p_train, y_train).value;
  const double test_nmse = nmse(p_test, y_test).value;
  return {std::move(model), b, train_nmse, test_nmse, std::move(p_train), std::move(p_test)};
}

Evaluation drive_and_fit(Reservoir& reservoir, const TimeSeries& input, const TimeSeries& target,
                         const SplitPlan& split, std::optional<double> beta) {
  return fit_readout(input, drive(reservoir, input), target, split, beta);
}

}  // namespace rclab
