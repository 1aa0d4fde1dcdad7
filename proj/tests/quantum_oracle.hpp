#pragma once

#include <cmath>

#include "rclab/quantum/kernel.hpp"
#include "rclab/random.hpp"

namespace rclab::testing {

using quantum::Complex;
using quantum::ComplexMatrix;

inline ComplexMatrix random_complex(Index rows, Index cols, Xoshiro256& rng) {
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return m;
}

inline ComplexMatrix random_hermitian(Index n, Xoshiro256& rng) {
  const ComplexMatrix a = random_complex(n, n, rng);
  return 0.5 * (a + a.adjoint());
}

inline ComplexMatrix random_density(Index n, Xoshiro256& rng) {
  const ComplexMatrix a = random_complex(n, n, rng);
  const ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

// Four-index definition (A (x) B)[i*p + k, j*q + l] = A[i, j] B[k, l].
inline ComplexMatrix kron_loop(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// exp(M) by scaling and squaring a 30-term Taylor series.
inline ComplexMatrix expm_taylor(const ComplexMatrix& m) {
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
  const ComplexMatrix a = m / std::pow(2.0, squarings);
  ComplexMatrix term = ComplexMatrix::Identity(m.rows(), m.cols());
  ComplexMatrix sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = (term * a / static_cast<double>(k)).eval();
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
  return sum;
}

// Conjugation by an explicit propagator, no eigendecomposition.
inline ComplexMatrix evolve_by_series(const ComplexMatrix& rho, const ComplexMatrix& h, double dt) {
  const ComplexMatrix u = expm_taylor(Complex(0.0, -dt) * h);
  return u * rho * u.adjoint();
}

// Plain RK4 for dz/dt = f(t, z) on a complex scalar.
template <typename F>
Complex rk4_scalar(Complex z, double t0, double t1, int steps, F f) {
  const double h = (t1 - t0) / steps;
  double t = t0;
  for (int i = 0; i < steps; ++i) {
    const Complex k1 = f(t, z);
    const Complex k2 = f(t + h / 2, z + h / 2 * k1);
    const Complex k3 = f(t + h / 2, z + h / 2 * k2);
    const Complex k4 = f(t + h, z + h * k3);
    z += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return z;
}

}  // namespace rclab::testing
