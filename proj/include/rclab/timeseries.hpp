#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace rclab {

using Index = Eigen::Index;

/// Uniformly sampled real multichannel sequence, stored channels x steps.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(Eigen::MatrixXd values, double dt = 1.0);
  static TimeSeries scalar(const Eigen::VectorXd& samples, double dt = 1.0);

  Index channels() const { return values_.rows(); }
  Index steps() const { return values_.cols(); }
  double dt() const { return dt_; }
  const Eigen::MatrixXd& values() const { return values_; }

  auto at(Index n) const { return values_.col(n); }
  // Row view of a single-channel series.
  Eigen::VectorXd channel(Index c) const { return values_.row(c).transpose(); }

  TimeSeries slice(Index begin, Index count) const;

 private:
  Eigen::MatrixXd values_;
  double dt_ = 1.0;
};

struct TaskData {
  TimeSeries input;
  TimeSeries target;
};

struct NarmaTask : TaskData {
  std::uint64_t seed_used = 0;
  int attempts = 1;  // > 1 when earlier seeds diverged
};

// NARMA recurrence replay on a given input; entries may be non-finite when the
// order-10 system diverges.
Eigen::VectorXd narma_recurrence(const Eigen::VectorXd& input, int order);

NarmaTask gen_narma(int order, Index length, std::uint64_t seed);

TaskData gen_sine_phase_task(double freq, const std::vector<double>& phases, Index length,
                             std::uint64_t seed, double dt = 1.0, Index segment_length = 50);

// u_n uniform in [0, 1]; target u_{n - delay}; first `delay` targets zero.
TaskData gen_memory_task(Index length, int delay, std::uint64_t seed);

// u_n uniform bits; target u_{n - delay} XOR u_{n - delay - 1}.
TaskData gen_delayed_parity_task(Index length, int delay, std::uint64_t seed);

enum class MetricKind { NMSE, RMSE, MemoryCapacity, ClassificationAccuracy };

struct Metric {
  MetricKind kind;
  double value;
};

const char* to_string(MetricKind kind);

// Sum of squared errors over sum of squared deviations of the target from its
// per-channel mean (i.e. MSE / population variance for one channel).
Metric nmse(const TimeSeries& pred, const TimeSeries& target);
Metric rmse(const TimeSeries& pred, const TimeSeries& target);

// Predictions snapped to the nearest label, compared to the target label.
Metric classification_accuracy(const TimeSeries& pred, const TimeSeries& target,
                               const std::vector<double>& labels);

/// Linear memory capacity of a feature trajectory (rows = time steps).
///
/// Delayed inputs u_{n-1..n-D} are evaluated on the common window n >= D,
/// centered and Gram-Schmidt orthonormalized in delay order before each is
/// reconstructed from the centered features by ridge regression. The capacity
/// is the sum of squared correlations between reconstructions and targets.
/// For independent inputs this is the classical sum of r^2; the
/// orthonormalization makes the bound MC <= rank(features) hold exactly.
Metric memory_capacity(const Eigen::MatrixXd& features, const TimeSeries& input, int max_delay);

}  // namespace rclab
