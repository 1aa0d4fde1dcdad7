#pragma once

#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rclab/errors.hpp"
#include "rclab/timeseries.hpp"

namespace rclab::quantum {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Dims = std::vector<Index>;

constexpr Index kMaxHilbertDim = 256;

inline Index product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

/// Kronecker product A (x) B; factor 0 is the most significant index.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                                               a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Traces out tensor factor `factor` of an operator on a space with the given
/// factor dimensions.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> partial_trace(
    const Eigen::MatrixBase<Derived>& rho, const Dims& dims, Index factor) {
  require(factor >= 0 && factor < static_cast<Index>(dims.size()), "partial_trace: invalid factor index");
  require(rho.rows() == product(dims) && rho.cols() == rho.rows(), "partial_trace: shape does not match dims");
  const Index d = dims[factor];
  const Index right = product(Dims(dims.begin() + factor + 1, dims.end()));
  const Index left = rho.rows() / (d * right);
  const Index out_dim = left * right;
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(out_dim, out_dim);
  for (Index l = 0; l < left; ++l)
    for (Index r = 0; r < right; ++r)
      for (Index lp = 0; lp < left; ++lp)
        for (Index rp = 0; rp < right; ++rp) {
          typename Derived::Scalar acc(0);
          for (Index a = 0; a < d; ++a) acc += rho((l * d + a) * right + r, (lp * d + a) * right + rp);
          out(l * right + r, lp * right + rp) = acc;
        }
  return out;
}

/// Complex Hermitian PSD trace-one operator with its tensor-factor layout.
/// Construction checks shape and dimension cap only; `validate` checks the
/// physical invariants.
class DensityMatrix {
 public:
  DensityMatrix(ComplexMatrix rho, Dims dims);

  static DensityMatrix pure(const ComplexVector& psi, Dims dims);
  static DensityMatrix basis_state(Index index, Dims dims);

  const ComplexMatrix& matrix() const { return rho_; }
  const Dims& dims() const { return dims_; }
  Index dim() const { return rho_.rows(); }

  double trace() const { return rho_.trace().real(); }
  double purity() const;
  double hermiticity_residual() const;
  double min_eigenvalue() const;
  Eigen::VectorXd populations() const { return rho_.diagonal().real(); }

  // Throws NumericError when any tolerance is exceeded.
  void validate(double hermitian_tol = 1e-10, double trace_tol = 1e-9, double eig_floor = -1e-8) const;

 private:
  ComplexMatrix rho_;
  Dims dims_;
};

DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b);
DensityMatrix partial_trace(const DensityMatrix& rho, Index factor);

// rho with factor `factor` replaced by `state`: the reduced state of the
// remaining factors, tensored with `state` in position `factor`.
DensityMatrix replace_factor(const DensityMatrix& rho, Index factor, const ComplexMatrix& state);

// Operator basis. Qubit basis |0>, |1> with sigma_z = diag(1, -1).
ComplexMatrix identity(Index dim);
ComplexMatrix destroy(Index levels);
ComplexMatrix number(Index levels);
ComplexMatrix sigma_x();
ComplexMatrix sigma_y();
ComplexMatrix sigma_z();
// I (x) ... (x) op (x) ... (x) I with op on factor `site`.
ComplexMatrix embed(const ComplexMatrix& op, Index site, const Dims& dims);

inline Complex expectation(const DensityMatrix& rho, const ComplexMatrix& op) {
  return rho.matrix().cwiseProduct(op.transpose()).sum();
}

double hermiticity_residual(const ComplexMatrix& h);

/// Closed-system propagator from one Hermitian eigendecomposition of H.
class UnitaryEvolver {
 public:
  explicit UnitaryEvolver(const ComplexMatrix& h);

  ComplexMatrix unitary(double dt) const;  // exp(-i H dt)
  DensityMatrix evolve(const DensityMatrix& rho, double dt) const;
  const Eigen::VectorXd& energies() const { return energies_; }

 private:
  ComplexMatrix vectors_;
  Eigen::VectorXd energies_;
};

DensityMatrix evolve_unitary(const DensityMatrix& rho, const ComplexMatrix& h, double dt);
DensityMatrix conjugate(const DensityMatrix& rho, const ComplexMatrix& u);

/// Fixed-step RK4 integrator of
///   d rho/dt = -i[H, rho] + sum_C (C rho C^+ - 1/2 {C^+ C, rho}).
/// Operators are stored sparse; every step re-symmetrizes rho and checks that
/// the trace moved by less than `trace_tol`.
class LindbladIntegrator {
 public:
  LindbladIntegrator(const ComplexMatrix& h, const std::vector<ComplexMatrix>& collapses);

  void set_hamiltonian(const ComplexMatrix& h);

  // Largest dt inside the RK4 stability region for a bound on the generator
  // norm; step() rejects larger steps.
  double max_stable_dt() const;

  DensityMatrix step(const DensityMatrix& rho, double dt) const;
  ComplexMatrix generator(const ComplexMatrix& rho) const;

  double trace_tol = 1e-9;

 private:
  using Sparse = Eigen::SparseMatrix<Complex>;
  void refresh_effective();

  Index dim_;
  ComplexMatrix h_;
  std::vector<Sparse> collapses_;
  ComplexMatrix decay_;  // sum C^+ C
  Sparse h_eff_;         // H - i/2 sum C^+ C
  double collapse_bound_ = 0.0;
  double h_eff_bound_ = 0.0;
};

DensityMatrix lindblad_step(const DensityMatrix& rho, const ComplexMatrix& h,
                            const std::vector<ComplexMatrix>& collapses, double dt);

}  // namespace rclab::quantum
