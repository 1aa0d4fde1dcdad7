#include "rclab/quantum/kernel.hpp"

#include <cmath>
#include <string>

#include "rclab/format.hpp"

namespace rclab::quantum {

namespace {

constexpr double kRk4StableRadius = 2.5;

template <typename M>
double norm_bound(const M& a) {
  // ||A||_2 <= sqrt(||A||_1 ||A||_inf)
  Eigen::VectorXd col = Eigen::VectorXd::Zero(a.cols());
  Eigen::VectorXd row = Eigen::VectorXd::Zero(a.rows());
  if constexpr (std::is_base_of_v<Eigen::SparseMatrixBase<M>, M>) {
    for (Index k = 0; k < a.outerSize(); ++k)
      for (typename M::InnerIterator it(a, k); it; ++it) {
        col[it.col()] += std::abs(it.value());
        row[it.row()] += std::abs(it.value());
      }
  } else {
    col = a.cwiseAbs().colwise().sum().transpose();
    row = a.cwiseAbs().rowwise().sum();
  }
  return std::sqrt(col.maxCoeff() * row.maxCoeff());
}

void check_dims(const ComplexMatrix& rho, const Dims& dims) {
  require(rho.rows() == rho.cols(), "DensityMatrix: matrix must be square");
  require(!dims.empty() && product(dims) == rho.rows(), "DensityMatrix: factor dims do not match matrix size");
  require(rho.rows() <= kMaxHilbertDim,
          "DensityMatrix: Hilbert dimension " + std::to_string(rho.rows()) + " exceeds cap " +
              std::to_string(kMaxHilbertDim));
}

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix rho, Dims dims) : rho_(std::move(rho)), dims_(std::move(dims)) {
  check_dims(rho_, dims_);
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi, Dims dims) {
  const double n = psi.norm();
  require(n > 0.0, "DensityMatrix::pure: zero vector");
  const ComplexVector v = psi / n;
  return DensityMatrix(v * v.adjoint(), std::move(dims));
}

DensityMatrix DensityMatrix::basis_state(Index index, Dims dims) {
  const Index d = product(dims);
  require(index >= 0 && index < d, "DensityMatrix::basis_state: index out of range");
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  rho(index, index) = 1.0;
  return DensityMatrix(std::move(rho), std::move(dims));
}

double DensityMatrix::purity() const { return rho_.cwiseAbs2().sum(); }

double DensityMatrix::hermiticity_residual() const { return quantum::hermiticity_residual(rho_); }

double DensityMatrix::min_eigenvalue() const {
  const ComplexMatrix herm = 0.5 * (rho_ + rho_.adjoint());
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void DensityMatrix::validate(double hermitian_tol, double trace_tol, double eig_floor) const {
  if (!rho_.allFinite()) throw NumericError("density matrix has non-finite entries");
  const double herm = hermiticity_residual();
  if (herm > hermitian_tol) throw NumericError("density matrix not Hermitian: residual " + format_double(herm));
  const double tr = std::abs(trace() - 1.0);
  if (tr > trace_tol) throw NumericError("density matrix trace drift " + format_double(tr));
  const double lo = min_eigenvalue();
  if (lo < eig_floor) throw NumericError("density matrix not positive: min eigenvalue " + format_double(lo));
}

DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityMatrix(kron(a.matrix(), b.matrix()), std::move(dims));
}

DensityMatrix partial_trace(const DensityMatrix& rho, Index factor) {
  require(rho.dims().size() >= 2, "partial_trace: need at least two factors");
  Dims dims = rho.dims();
  ComplexMatrix reduced = partial_trace(rho.matrix(), dims, factor);
  dims.erase(dims.begin() + factor);
  return DensityMatrix(std::move(reduced), std::move(dims));
}

DensityMatrix replace_factor(const DensityMatrix& rho, Index factor, const ComplexMatrix& state) {
  const Dims& dims = rho.dims();
  require(factor >= 0 && factor < static_cast<Index>(dims.size()), "replace_factor: invalid factor index");
  const Index d = dims[factor];
  require(state.rows() == d && state.cols() == d, "replace_factor: state dimension mismatch");
  if (dims.size() == 1) return DensityMatrix(state, dims);
  const ComplexMatrix reduced = partial_trace(rho.matrix(), dims, factor);
  const Index right = product(Dims(dims.begin() + factor + 1, dims.end()));
  const Index left = rho.dim() / (d * right);
  ComplexMatrix out(rho.dim(), rho.dim());
  for (Index l = 0; l < left; ++l)
    for (Index a = 0; a < d; ++a)
      for (Index r = 0; r < right; ++r)
        for (Index lp = 0; lp < left; ++lp)
          for (Index ap = 0; ap < d; ++ap)
            for (Index rp = 0; rp < right; ++rp)
              out((l * d + a) * right + r, (lp * d + ap) * right + rp) =
                  state(a, ap) * reduced(l * right + r, lp * right + rp);
  return DensityMatrix(std::move(out), dims);
}

ComplexMatrix identity(Index dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix destroy(Index levels) {
  require(levels >= 2, "destroy: need at least two levels");
  ComplexMatrix a = ComplexMatrix::Zero(levels, levels);
  for (Index n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

ComplexMatrix number(Index levels) {
  ComplexMatrix n = ComplexMatrix::Zero(levels, levels);
  for (Index k = 0; k < levels; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

ComplexMatrix sigma_x() {
  ComplexMatrix s(2, 2);
  s << 0.0, 1.0, 1.0, 0.0;
  return s;
}

ComplexMatrix sigma_y() {
  ComplexMatrix s(2, 2);
  s << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return s;
}

ComplexMatrix sigma_z() {
  ComplexMatrix s(2, 2);
  s << 1.0, 0.0, 0.0, -1.0;
  return s;
}

ComplexMatrix embed(const ComplexMatrix& op, Index site, const Dims& dims) {
  require(site >= 0 && site < static_cast<Index>(dims.size()), "embed: invalid site");
  require(op.rows() == dims[site] && op.cols() == dims[site], "embed: operator dimension mismatch");
  const Index left = product(Dims(dims.begin(), dims.begin() + site));
  const Index right = product(Dims(dims.begin() + site + 1, dims.end()));
  return kron(kron(identity(left), op), identity(right));
}

double hermiticity_residual(const ComplexMatrix& h) { return (h - h.adjoint()).cwiseAbs().maxCoeff(); }

UnitaryEvolver::UnitaryEvolver(const ComplexMatrix& h) {
  require(h.rows() == h.cols(), "UnitaryEvolver: Hamiltonian must be square");
  require(h.rows() <= kMaxHilbertDim, "UnitaryEvolver: Hilbert dimension exceeds cap");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (hermiticity_residual(h) > 1e-10 * scale) throw ConfigError("UnitaryEvolver: Hamiltonian is not Hermitian");
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (h + h.adjoint()));
  if (solver.info() != Eigen::Success) throw NumericError("UnitaryEvolver: eigendecomposition failed");
  vectors_ = solver.eigenvectors();
  energies_ = solver.eigenvalues();
}

ComplexMatrix UnitaryEvolver::unitary(double dt) const {
  const ComplexVector phases = (energies_.cast<Complex>() * Complex(0.0, -dt)).array().exp();
  return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

DensityMatrix conjugate(const DensityMatrix& rho, const ComplexMatrix& u) {
  ComplexMatrix out = u * rho.matrix() * u.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(std::move(out), rho.dims());
}

DensityMatrix UnitaryEvolver::evolve(const DensityMatrix& rho, double dt) const {
  require(rho.dim() == vectors_.rows(), "UnitaryEvolver: state dimension mismatch");
  return conjugate(rho, unitary(dt));
}

DensityMatrix evolve_unitary(const DensityMatrix& rho, const ComplexMatrix& h, double dt) {
  return UnitaryEvolver(h).evolve(rho, dt);
}

LindbladIntegrator::LindbladIntegrator(const ComplexMatrix& h, const std::vector<ComplexMatrix>& collapses)
    : dim_(h.rows()) {
  require(h.rows() == h.cols(), "LindbladIntegrator: Hamiltonian must be square");
  require(dim_ <= kMaxHilbertDim, "LindbladIntegrator: Hilbert dimension exceeds cap");
  decay_ = ComplexMatrix::Zero(dim_, dim_);
  for (const auto& c : collapses) {
    require(c.rows() == dim_ && c.cols() == dim_, "LindbladIntegrator: collapse operator dimension mismatch");
    collapses_.push_back(c.sparseView());
    decay_ += c.adjoint() * c;
    const double n = norm_bound(c);
    collapse_bound_ += n * n;
  }
  set_hamiltonian(h);
}

void LindbladIntegrator::set_hamiltonian(const ComplexMatrix& h) {
  require(h.rows() == dim_ && h.cols() == dim_, "LindbladIntegrator: Hamiltonian dimension mismatch");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (hermiticity_residual(h) > 1e-10 * scale) throw ConfigError("LindbladIntegrator: Hamiltonian is not Hermitian");
  h_ = h;
  refresh_effective();
}

void LindbladIntegrator::refresh_effective() {
  const ComplexMatrix h_eff = h_ - Complex(0.0, 0.5) * decay_;
  h_eff_ = h_eff.sparseView();
  h_eff_bound_ = norm_bound(h_eff_);
}

double LindbladIntegrator::max_stable_dt() const {
  const double bound = 2.0 * h_eff_bound_ + collapse_bound_;
  return bound > 0.0 ? kRk4StableRadius / bound : std::numeric_limits<double>::infinity();
}

ComplexMatrix LindbladIntegrator::generator(const ComplexMatrix& rho) const {
  // rho is Hermitian at every RK stage, so rho H_eff^+ = (H_eff rho)^+ and
  // C rho C^+ = C (C rho)^+.
  const ComplexMatrix m = h_eff_ * rho;
  ComplexMatrix out = Complex(0.0, -1.0) * (m - m.adjoint());
  for (const auto& c : collapses_) {
    const ComplexMatrix c_rho = c * rho;
    out.noalias() += c * c_rho.adjoint();
  }
  return out;
}

DensityMatrix LindbladIntegrator::step(const DensityMatrix& rho, double dt) const {
  require(rho.dim() == dim_, "LindbladIntegrator: state dimension mismatch");
  require(dt > 0.0, "LindbladIntegrator: dt must be positive");
  if (dt > max_stable_dt())
    throw NumericError("lindblad_step: dt=" + format_double(dt) + " exceeds the RK4 stability limit " +
                       format_double(max_stable_dt()) + "; use a smaller dt");
  const ComplexMatrix& r = rho.matrix();
  const ComplexMatrix k1 = generator(r);
  const ComplexMatrix k2 = generator(r + 0.5 * dt * k1);
  const ComplexMatrix k3 = generator(r + 0.5 * dt * k2);
  const ComplexMatrix k4 = generator(r + dt * k3);
  ComplexMatrix next = r + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  next = 0.5 * (next + next.adjoint()).eval();
  if (!next.allFinite()) throw NumericError("lindblad_step: non-finite state; use a smaller dt");
  const double drift = std::abs(next.trace().real() - r.trace().real());
  if (drift > trace_tol)
    throw NumericError("lindblad_step: trace drift " + format_double(drift) + " per step; use a smaller dt");
  return DensityMatrix(std::move(next), rho.dims());
}

DensityMatrix lindblad_step(const DensityMatrix& rho, const ComplexMatrix& h,
                            const std::vector<ComplexMatrix>& collapses, double dt) {
  return LindbladIntegrator(h, collapses).step(rho, dt);
}

}  // namespace rclab::quantum
