#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "nmr/cmat.hpp"

namespace nmr {

struct EigResult {
  std::vector<double> values;  // ascending
  CMat vectors;                // columns are eigenvectors, A = V diag(values) V^dag
};

// Cyclic Jacobi diagonalization of a Hermitian matrix.
EigResult eig_hermitian(const CMat& a);

// Largest singular value, sqrt of the top eigenvalue of A^dag A.
double two_norm(const CMat& a);

// Matrix exponential by scaling and squaring with a Taylor series; intended
// for the skew-Hermitian generators used throughout (norms of order 1..100).
CMat expm(const CMat& a);

// Solves A X = B by LU with partial pivoting. Throws std::runtime_error when
// A is numerically singular.
CMat solve(const CMat& a, const CMat& b);

// In-place radix-2 FFT; forward applies e^{-2*pi*i*k*n/N} with no scaling,
// inverse applies the conjugate kernel and 1/N. Size must be a power of two.
void fft_inplace(std::vector<cd>& x, bool inverse);

// Golden-section minimizer of a unimodal-ish function on [a, b].
double golden_min(const std::function<double(double)>& f, double a, double b, double tol);

struct RecoveryFit {
  double s0 = 0, alpha = 0, t1 = 0;  // model s(t) = s0 * (1 - alpha * exp(-t/t1))
  int iterations = 0;
};
RecoveryFit fit_recovery(const std::vector<double>& t, const std::vector<double>& s);

struct DecayFit {
  double s0 = 0, t2 = 0;  // model s(t) = s0 * exp(-t/t2), fitted on log(s)
};
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& s);

}  // namespace nmr
