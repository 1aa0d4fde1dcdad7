#include "rclab/timeseries.hpp"

#include <cmath>
#include <string>

#include "rclab/errors.hpp"
#include "rclab/random.hpp"

namespace rclab {

TimeSeries::TimeSeries(Eigen::MatrixXd values, double dt) : values_(std::move(values)), dt_(dt) {
  require(dt > 0.0 && std::isfinite(dt), "TimeSeries: dt must be positive and finite");
  require(values_.cols() >= 1 && values_.rows() >= 1, "TimeSeries: need at least one channel and one step");
  require(values_.allFinite(), "TimeSeries: non-finite entry");
}

TimeSeries TimeSeries::scalar(const Eigen::VectorXd& samples, double dt) {
  return TimeSeries(samples.transpose(), dt);
}

TimeSeries TimeSeries::slice(Index begin, Index count) const {
  require(begin >= 0 && count >= 1 && begin + count <= steps(), "TimeSeries::slice out of range");
  return TimeSeries(values_.middleCols(begin, count), dt_);
}

Eigen::VectorXd narma_recurrence(const Eigen::VectorXd& u, int order) {
  require(order == 2 || order == 10, "narma: order must be 2 or 10");
  const Index n = u.size();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (Index t = order; t < n; ++t) {
    if (order == 10) {
      const double window = y.segment(t - 10, 10).sum();
      y[t] = 0.3 * y[t - 1] + 0.05 * y[t - 1] * window + 1.5 * u[t - 10] * u[t - 1] + 0.1;
    } else {
      y[t] = 0.4 * y[t - 1] + 0.4 * y[t - 1] * y[t - 2] + 0.6 * std::pow(u[t - 1], 3) + 0.1;
    }
  }
  return y;
}

NarmaTask gen_narma(int order, Index length, std::uint64_t seed) {
  require(order == 2 || order == 10, "gen_narma: order must be 2 or 10");
  require(length > order, "gen_narma: length must exceed the order");
  constexpr int kMaxTries = 10;
  for (int attempt = 0; attempt < kMaxTries; ++attempt) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
    Xoshiro256 rng(s);
    Eigen::VectorXd u(length);
    for (Index i = 0; i < length; ++i) u[i] = rng.uniform(0.0, 0.5);
    Eigen::VectorXd y = narma_recurrence(u, order);
    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > 1e6) continue;
    NarmaTask task;
    task.input = TimeSeries::scalar(u);
    task.target = TimeSeries::scalar(y);
    task.seed_used = s;
    task.attempts = attempt + 1;
    return task;
  }
  throw NumericError("gen_narma: recurrence diverged for seeds " + std::to_string(seed) + ".." +
                     std::to_string(seed + kMaxTries - 1));
}

TaskData gen_sine_phase_task(double freq, const std::vector<double>& phases, Index length,
                             std::uint64_t seed, double dt, Index segment_length) {
  require(!phases.empty(), "gen_sine_phase_task: phase set is empty");
  require(freq > 0.0 && dt > 0.0, "gen_sine_phase_task: freq and dt must be positive");
  require(freq * dt < 0.5, "gen_sine_phase_task: freq*dt must be below the Nyquist limit 0.5");
  require(length >= 1 && segment_length >= 1, "gen_sine_phase_task: bad length");
  Xoshiro256 rng(seed);
  Eigen::VectorXd u(length), y(length);
  double phase = phases.front();
  for (Index n = 0; n < length; ++n) {
    if (n % segment_length == 0) phase = phases[rng.below(phases.size())];
    u[n] = std::sin(2.0 * M_PI * freq * static_cast<double>(n) * dt + phase);
    y[n] = phase;
  }
  return {TimeSeries::scalar(u, dt), TimeSeries::scalar(y, dt)};
}

TaskData gen_memory_task(Index length, int delay, std::uint64_t seed) {
  require(delay >= 0 && length > delay, "gen_memory_task: need length > delay >= 0");
  Xoshiro256 rng(seed);
  Eigen::VectorXd u(length);
  for (Index i = 0; i < length; ++i) u[i] = rng.uniform01();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(length);
  y.tail(length - delay) = u.head(length - delay);
  return {TimeSeries::scalar(u), TimeSeries::scalar(y)};
}

TaskData gen_delayed_parity_task(Index length, int delay, std::uint64_t seed) {
  require(delay >= 0 && length > delay + 1, "gen_delayed_parity_task: need length > delay + 1");
  Xoshiro256 rng(seed);
  Eigen::VectorXd u(length);
  for (Index i = 0; i < length; ++i) u[i] = static_cast<double>(rng.below(2));
  Eigen::VectorXd y = Eigen::VectorXd::Zero(length);
  for (Index n = delay + 1; n < length; ++n) y[n] = (u[n - delay] != u[n - delay - 1]) ? 1.0 : 0.0;
  return {TimeSeries::scalar(u), TimeSeries::scalar(y)};
}

const char* to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::NMSE: return "nmse";
    case MetricKind::RMSE: return "rmse";
    case MetricKind::MemoryCapacity: return "memory_capacity";
    case MetricKind::ClassificationAccuracy: return "accuracy";
  }
  return "?";
}

namespace {
void require_same_shape(const TimeSeries& a, const TimeSeries& b, const char* who) {
  require(a.channels() == b.channels() && a.steps() == b.steps(),
          std::string(who) + ": prediction and target shapes differ");
}
}  // namespace

Metric nmse(const TimeSeries& pred, const TimeSeries& target) {
  require_same_shape(pred, target, "nmse");
  const Eigen::MatrixXd& t = target.values();
  const Eigen::MatrixXd centered = t.colwise() - t.rowwise().mean();
  const double denom = centered.squaredNorm();
  require(denom > 0.0, "nmse: target has zero variance");
  return {MetricKind::NMSE, (pred.values() - t).squaredNorm() / denom};
}

Metric rmse(const TimeSeries& pred, const TimeSeries& target) {
  require_same_shape(pred, target, "rmse");
  const double n = static_cast<double>(target.values().size());
  return {MetricKind::RMSE, std::sqrt((pred.values() - target.values()).squaredNorm() / n)};
}

Metric classification_accuracy(const TimeSeries& pred, const TimeSeries& target,
                               const std::vector<double>& labels) {
  require_same_shape(pred, target, "classification_accuracy");
  require(!labels.empty(), "classification_accuracy: empty label set");
  auto nearest = [&](double v) {
    double best = labels.front();
    for (double l : labels)
      if (std::abs(v - l) < std::abs(v - best)) best = l;
    return best;
  };
  Index hits = 0;
  const Eigen::MatrixXd& p = pred.values();
  const Eigen::MatrixXd& t = target.values();
  for (Index i = 0; i < p.size(); ++i)
    if (nearest(p(i)) == nearest(t(i))) ++hits;
  return {MetricKind::ClassificationAccuracy, static_cast<double>(hits) / static_cast<double>(p.size())};
}

Metric memory_capacity(const Eigen::MatrixXd& features, const TimeSeries& input, int max_delay) {
  require(input.channels() == 1, "memory_capacity: input must be single-channel");
  const Index length = input.steps();
  require(features.rows() == length, "memory_capacity: feature rows must equal input length");
  require(max_delay >= 1, "memory_capacity: max_delay must be >= 1");
  require(2 * static_cast<Index>(max_delay) < length, "memory_capacity: max_delay >= length/2 is ill-posed");

  const Index rows = length - max_delay;
  const Eigen::VectorXd u = input.channel(0);

  Eigen::MatrixXd f = features.bottomRows(rows);
  f.rowwise() -= f.colwise().mean();

  Eigen::MatrixXd targets(rows, max_delay);
  for (int k = 1; k <= max_delay; ++k) targets.col(k - 1) = u.segment(max_delay - k, rows);
  targets.rowwise() -= targets.colwise().mean();

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(targets);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, max_delay);
  const Eigen::MatrixXd& r = qr.matrixQR();
  const double scale = r.diagonal().cwiseAbs().maxCoeff();

  Eigen::MatrixXd gram = f.transpose() * f;
  const double beta = 1e-8 * gram.trace() / std::max<Index>(1, gram.rows());
  gram.diagonal().array() += beta;
  const Eigen::LDLT<Eigen::MatrixXd> solver(gram);
  const Eigen::MatrixXd weights = solver.solve(f.transpose() * q);
  const Eigen::MatrixXd recon = f * weights;

  double mc = 0.0;
  for (int k = 0; k < max_delay; ++k) {
    if (std::abs(r(k, k)) <= 1e-12 * scale) continue;  // delayed input in span of shorter delays
    const double yy = recon.col(k).squaredNorm();
    if (yy <= 0.0) continue;
    const double cross = recon.col(k).dot(q.col(k));
    mc += cross * cross / (yy * q.col(k).squaredNorm());
  }
  return {MetricKind::MemoryCapacity, mc};
}

}  // namespace rclab
