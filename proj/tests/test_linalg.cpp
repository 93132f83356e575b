#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "nmr/linalg.hpp"
#include "vendor/doctest.h"

using nmr::cd;
using nmr::CMat;

namespace {

CMat hermitian_3x3() {
  CMat a(3, 3);
  a(0, 0) = 2.0;
  a(1, 1) = -1.0;
  a(2, 2) = 0.5;
  a(0, 1) = cd(1.0, 0.5);
  a(1, 0) = cd(1.0, -0.5);
  a(0, 2) = cd(0.0, -2.0);
  a(2, 0) = cd(0.0, 2.0);
  a(1, 2) = cd(0.25, 0.25);
  a(2, 1) = cd(0.25, -0.25);
  return a;
}

}  // namespace

TEST_CASE("eig_hermitian reconstructs the matrix and sorts eigenvalues") {
  CMat a = hermitian_3x3();
  auto [values, v] = nmr::eig_hermitian(a);
  REQUIRE(values.size() == 3);
  CHECK(values[0] <= values[1]);
  CHECK(values[1] <= values[2]);

  // V is unitary and A V = V diag(values)
  CHECK(nmr::max_abs_diff(v.dagger() * v, CMat::identity(3)) < 1e-12);
  CMat recon = v * CMat::diag({values[0], values[1], values[2]}) * v.dagger();
  CHECK(nmr::max_abs_diff(recon, a) < 1e-11);

  // trace and sum of eigenvalues agree
  double sum = values[0] + values[1] + values[2];
  CHECK(std::abs(sum - a.trace().real()) < 1e-12);
}

TEST_CASE("eig_hermitian on a known 2x2: Pauli X has eigenvalues -1, +1") {
  CMat x(2, 2);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  auto r = nmr::eig_hermitian(x);
  CHECK(r.values[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(r.values[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("two_norm: known values") {
  // Unitary matrices have spectral norm 1.
  CMat h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h(0, 0) = s;
  h(0, 1) = s;
  h(1, 0) = s;
  h(1, 1) = -s;
  CHECK(nmr::two_norm(h) == doctest::Approx(1.0).epsilon(1e-12));

  // diag(3, -4i) has norm 4; scaling scales the norm.
  CMat d = CMat::diag({cd(3.0, 0.0), cd(0.0, -4.0)});
  CHECK(nmr::two_norm(d) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(nmr::two_norm(cd(0.0, 2.0) * d) == doctest::Approx(8.0).epsilon(1e-12));

  // Rank-one [[1,1],[1,1]] has singular values {2, 0}.
  CMat r1(2, 2);
  r1(0, 0) = r1(0, 1) = r1(1, 0) = r1(1, 1) = 1.0;
  CHECK(nmr::two_norm(r1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("expm: rotation generator gives sine and cosine") {
  // exp(i*theta*X) = cos(theta) I + i sin(theta) X
  const double theta = 0.7;
  CMat g(2, 2);
  g(0, 1) = cd(0.0, theta);
  g(1, 0) = cd(0.0, theta);
  CMat u = nmr::expm(g);
  CHECK(std::abs(u(0, 0) - cd(std::cos(theta), 0.0)) < 1e-13);
  CHECK(std::abs(u(0, 1) - cd(0.0, std::sin(theta))) < 1e-13);

  // exp of a diagonal matrix is elementwise; large imaginary entries exercise scaling.
  CMat d = CMat::diag({cd(0.0, 50.0), cd(0.0, -120.0)});
  CMat e = nmr::expm(d);
  CHECK(std::abs(e(0, 0) - std::exp(cd(0.0, 50.0))) < 1e-10);
  CHECK(std::abs(e(1, 1) - std::exp(cd(0.0, -120.0))) < 1e-10);
  CHECK(std::abs(e(0, 1)) == 0.0);

  // exp(A) exp(-A) = I
  CMat a = hermitian_3x3();
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) a(r, c) *= cd(0.0, 1.0);
  CMat minus = cd(-1.0, 0.0) * a;
  CHECK(nmr::max_abs_diff(nmr::expm(a) * nmr::expm(minus), CMat::identity(3)) < 1e-12);
}

TEST_CASE("solve: LU with pivoting recovers known solutions") {
  CMat a(3, 3);
  a(0, 0) = 0.0;  // forces a pivot swap
  a(0, 1) = 2.0;
  a(0, 2) = cd(1.0, 1.0);
  a(1, 0) = 4.0;
  a(1, 1) = cd(0.0, -1.0);
  a(1, 2) = 3.0;
  a(2, 0) = cd(-1.0, 0.5);
  a(2, 1) = 1.0;
  a(2, 2) = 5.0;
  CMat x_true(3, 2);
  x_true(0, 0) = 1.0;
  x_true(1, 0) = cd(0.0, 2.0);
  x_true(2, 0) = -1.0;
  x_true(0, 1) = cd(2.0, -1.0);
  x_true(1, 1) = 0.0;
  x_true(2, 1) = cd(0.5, 0.5);
  CMat b = a * x_true;
  CMat x = nmr::solve(a, b);
  CHECK(nmr::max_abs_diff(x, x_true) < 1e-12);

  CMat sing(2, 2);
  sing(0, 0) = 1.0;
  sing(0, 1) = 2.0;
  sing(1, 0) = 2.0;
  sing(1, 1) = 4.0;
  CHECK_THROWS_AS(nmr::solve(sing, CMat::identity(2)), std::runtime_error);
}

TEST_CASE("fft: single tone lands in one forward bin; inverse round-trips") {
  const std::size_t n = 64;
  using std::numbers::pi;
  // x[t] = e^{+2 pi i f t / n} concentrates in bin f under the e^{-...} kernel.
  const std::size_t f = 5;
  std::vector<cd> x(n);
  for (std::size_t t = 0; t < n; ++t)
    x[t] = std::exp(cd(0.0, 2.0 * pi * static_cast<double>(f * t) / static_cast<double>(n)));
  auto orig = x;
  nmr::fft_inplace(x, false);
  for (std::size_t k = 0; k < n; ++k) {
    const double want = (k == f) ? static_cast<double>(n) : 0.0;
    CHECK(std::abs(x[k] - cd(want, 0.0)) < 1e-10);
  }
  nmr::fft_inplace(x, true);
  for (std::size_t t = 0; t < n; ++t) CHECK(std::abs(x[t] - orig[t]) < 1e-12);
}

TEST_CASE("fft: linearity against a direct DFT oracle") {
  const std::size_t n = 16;
  using std::numbers::pi;
  std::vector<cd> x(n);
  for (std::size_t t = 0; t < n; ++t)
    x[t] = cd(std::cos(0.3 * static_cast<double>(t)), std::sin(1.1 * static_cast<double>(t) + 0.2));
  std::vector<cd> want(n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t t = 0; t < n; ++t)
      want[k] += x[t] * std::exp(cd(0.0, -2.0 * pi * static_cast<double>(k * t) / static_cast<double>(n)));
  nmr::fft_inplace(x, false);
  for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(x[k] - want[k]) < 1e-11);
}

TEST_CASE("golden_min finds interior minima") {
  auto f = [](double x) { return (x - 1.25) * (x - 1.25) + 3.0; };
  CHECK(nmr::golden_min(f, 0.0, 4.0, 1e-9) == doctest::Approx(1.25).epsilon(1e-6));
  auto g = [](double x) { return -std::sin(x); };  // min of -sin on [0, pi] at pi/2
  CHECK(nmr::golden_min(g, 0.0, std::numbers::pi, 1e-9) ==
        doctest::Approx(std::numbers::pi / 2).epsilon(1e-6));
}

TEST_CASE("fit_recovery recovers inversion-recovery parameters from clean data") {
  const double s0 = 2.5, alpha = 1.9, t1 = 0.8;
  std::vector<double> t, s;
  for (int i = 0; i <= 20; ++i) {
    double ti = 0.05 * static_cast<double>(i) * 4.0;
    t.push_back(ti);
    s.push_back(s0 * (1.0 - alpha * std::exp(-ti / t1)));
  }
  auto fit = nmr::fit_recovery(t, s);
  CHECK(fit.s0 == doctest::Approx(s0).epsilon(1e-6));
  CHECK(fit.alpha == doctest::Approx(alpha).epsilon(1e-6));
  CHECK(fit.t1 == doctest::Approx(t1).epsilon(1e-6));
}

TEST_CASE("fit_decay recovers exponential decay parameters") {
  const double s0 = 1.7, t2 = 0.35;
  std::vector<double> t, s;
  for (int i = 1; i <= 12; ++i) {
    double ti = 0.08 * static_cast<double>(i);
    t.push_back(ti);
    s.push_back(s0 * std::exp(-ti / t2));
  }
  auto fit = nmr::fit_decay(t, s);
  CHECK(fit.s0 == doctest::Approx(s0).epsilon(1e-9));
  CHECK(fit.t2 == doctest::Approx(t2).epsilon(1e-9));
}
