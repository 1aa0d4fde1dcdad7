#include "rclab/readout.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "rclab/errors.hpp"
#include "rclab/format.hpp"

namespace rclab {

namespace {
constexpr const char* kMagic = "rclab-readout";
constexpr int kFormatVersion = 1;
}  // namespace

ReadoutModel::ReadoutModel(Eigen::MatrixXd w_out, double beta, Index input_width)
    : w_out_(std::move(w_out)), beta_(beta), input_width_(input_width) {
  require(beta_ >= 0.0, "ReadoutModel: beta must be >= 0");
  require(input_width_ >= 0 && w_out_.cols() >= 1 + input_width_, "ReadoutModel: inconsistent widths");
  if (!w_out_.allFinite()) throw NumericError("ReadoutModel: non-finite weights");
}

void ReadoutModel::save(std::ostream& os) const {
  os << kMagic << ' ' << kFormatVersion << '\n';
  os << "rows " << w_out_.rows() << " cols " << w_out_.cols() << " input_width " << input_width_ << '\n';
  os << "beta " << format_double(beta_) << '\n';
  for (Index i = 0; i < w_out_.rows(); ++i) {
    for (Index j = 0; j < w_out_.cols(); ++j) os << (j ? " " : "") << format_double(w_out_(i, j));
    os << '\n';
  }
}

ReadoutModel ReadoutModel::load(std::istream& is) {
  std::string magic, key;
  int version = 0;
  is >> magic >> version;
  require(is && magic == kMagic, "ReadoutModel::load: not a readout file");
  require(version == kFormatVersion, "ReadoutModel::load: unsupported version " + std::to_string(version));
  Index rows = 0, cols = 0, input_width = 0;
  std::string k1, k2, k3, k4, beta_text;
  is >> k1 >> rows >> k2 >> cols >> k3 >> input_width >> k4 >> beta_text;
  require(is && k1 == "rows" && k2 == "cols" && k3 == "input_width" && k4 == "beta",
          "ReadoutModel::load: malformed header");
  require(rows >= 1 && cols >= 1, "ReadoutModel::load: bad shape");
  Eigen::MatrixXd w(rows, cols);
  std::string tok;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      require(static_cast<bool>(is >> tok), "ReadoutModel::load: truncated weights");
      w(i, j) = parse_double(tok);
    }
  return ReadoutModel(std::move(w), parse_double(beta_text), input_width);
}

StateMatrix assemble_state_matrix(const TimeSeries& inputs, const Eigen::MatrixXd& states) {
  require(states.rows() == inputs.steps(), "assemble_state_matrix: input and state lengths differ");
  const Index nu = inputs.channels();
  StateMatrix x(1 + nu + states.cols(), states.rows());
  x.row(0).setOnes();
  x.middleRows(1, nu) = inputs.values();
  x.bottomRows(states.cols()) = states.transpose();
  if (!x.allFinite()) throw NumericError("assemble_state_matrix: non-finite state");
  return x;
}

double default_beta(const StateMatrix& x) {
  return 1e-8 * x.squaredNorm() / static_cast<double>(std::max<Index>(1, x.rows()));
}

Index default_washout(Index steps) { return std::min<Index>(steps / 10, 200); }

ReadoutModel train_ridge(const StateMatrix& x, const Eigen::MatrixXd& y_target, double beta,
                         Index input_width) {
  require(beta >= 0.0, "train_ridge: beta must be >= 0");
  require(y_target.cols() == x.cols(), "train_ridge: target and state matrices have different step counts");
  require(x.cols() >= 1, "train_ridge: empty state matrix");

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(x.rows(), x.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
  gram.diagonal().array() += beta;
  const Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(gram);
  if (llt.info() != Eigen::Success || (beta == 0.0 && llt.rcond() < 1e-13))
    throw NumericError("train_ridge: X X^T + beta I is singular; use beta > 0");

  const Eigen::MatrixXd w_t = llt.solve(x * y_target.transpose());
  return ReadoutModel(w_t.transpose(), beta, input_width);
}

Eigen::MatrixXd predict(const ReadoutModel& model, const StateMatrix& x) {
  require(x.rows() == model.weights().cols(), "predict: state matrix rows do not match the readout");
  return model.weights() * x;
}

TimeSeries predict(const ReadoutModel& model, const TimeSeries& inputs, const Eigen::MatrixXd& states) {
  require(inputs.channels() == model.input_width(), "predict: input width does not match the readout");
  require(states.cols() == model.state_width(), "predict: state width does not match the readout");
  return TimeSeries(predict(model, assemble_state_matrix(inputs, states)), inputs.dt());
}

}  // namespace rclab
