#pragma once

#include <optional>

#include "rclab/readout.hpp"
#include "rclab/reservoir.hpp"

namespace rclab {

// Contiguous washout | train | test segments of a driven run.
struct SplitPlan {
  Index washout = 0;
  Index train = 0;
  Index test = 0;
};

// train = floor(train_fraction * (steps - washout)); the rest is test.
// washout defaults to default_washout(steps).
SplitPlan plan_split(Index steps, double train_fraction = 0.7, std::optional<Index> washout = {});

struct Evaluation {
  ReadoutModel model;
  double beta = 0.0;
  double train_nmse = 0.0;
  double test_nmse = 0.0;
  TimeSeries train_prediction;
  TimeSeries test_prediction;
};

// features: steps x F as returned by drive(). beta defaults to default_beta
// of the training state matrix.
Evaluation fit_readout(const TimeSeries& input, const Eigen::MatrixXd& features, const TimeSeries& target,
                       const SplitPlan& split, std::optional<double> beta = {});

Evaluation drive_and_fit(Reservoir& reservoir, const TimeSeries& input, const TimeSeries& target,
                         const SplitPlan& split, std::optional<double> beta = {});

}  // namespace rclab
