#include <complex>
#include <cstdint>
#include <vector>

#include "nmr/cmat.hpp"
#include "nmr/kernels.hpp"
#include "vendor/doctest.h"

using nmr::kernels::cd;

namespace {

// Oracle: textbook triple loop, accumulation order independent of any kernel.
void matmul_naive(const cd* a, const cd* b, cd* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cd acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
      c[i * n + j] = acc;
    }
}

// Deterministic pseudo-random complex entries (no global RNG state).
std::vector<cd> fill(std::size_t count, std::uint64_t seed) {
  std::vector<cd> v(count);
  std::uint64_t s = seed * 6364136223846793005ULL + 1442695040888963407ULL;
  auto next = [&s] {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return static_cast<double>(static_cast<std::int64_t>(s >> 11)) / 9007199254740992.0;
  };
  for (auto& x : v) x = cd(next(), next());
  return v;
}

double max_err(const std::vector<cd>& a, const std::vector<cd>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("scalar matmul matches naive oracle on assorted shapes") {
  const std::size_t shapes[][3] = {{1, 1, 1},  {2, 2, 2},  {3, 5, 7},   {4, 4, 4},
                                   {8, 8, 8},  {5, 3, 2},  {16, 16, 16}, {7, 9, 11},
                                   {1, 17, 1}, {13, 1, 13}, {64, 64, 64}};
  for (auto [m, k, n] : shapes) {
    CAPTURE(m);
    CAPTURE(k);
    CAPTURE(n);
    auto a = fill(m * k, 11 * m + k);
    auto b = fill(k * n, 17 * k + n);
    std::vector<cd> want(m * n), got(m * n);
    matmul_naive(a.data(), b.data(), want.data(), m, k, n);
    nmr::kernels::matmul_scalar(a.data(), b.data(), got.data(), m, k, n);
    CHECK(max_err(want, got) < 1e-12 * static_cast<double>(k));
  }
}

TEST_CASE("avx2 matmul matches scalar on assorted shapes including odd sizes") {
  if (!nmr::kernels::avx2_available()) {
    MESSAGE("AVX2 not available on this machine; equivalence covered by scalar-only run");
    return;
  }
  const std::size_t shapes[][3] = {{1, 1, 1}, {2, 3, 4},   {3, 3, 3},   {4, 4, 4},
                                   {5, 5, 5}, {6, 7, 5},   {8, 8, 8},   {9, 9, 9},
                                   {15, 31, 7}, {32, 32, 32}, {33, 65, 31}, {128, 128, 128}};
  for (auto [m, k, n] : shapes) {
    CAPTURE(m);
    CAPTURE(k);
    CAPTURE(n);
    auto a = fill(m * k, 101 * m + k);
    auto b = fill(k * n, 103 * k + n);
    std::vector<cd> want(m * n), got(m * n);
    nmr::kernels::matmul_scalar(a.data(), b.data(), want.data(), m, k, n);
    nmr::kernels::matmul_avx2(a.data(), b.data(), got.data(), m, k, n);
    CHECK(max_err(want, got) < 1e-12 * static_cast<double>(k));
  }
}

TEST_CASE("backend selection routes the shared entry point") {
  namespace K = nmr::kernels;
  const auto restore = K::active_backend();

  K::set_backend(K::Backend::scalar);
  CHECK(K::active_backend() == K::Backend::scalar);
  CHECK(std::string(K::backend_name()) == "scalar");

  auto a = fill(16, 1), b = fill(16, 2);
  std::vector<cd> scalar_out(16), routed(16);
  K::matmul_scalar(a.data(), b.data(), scalar_out.data(), 4, 4, 4);
  K::matmul(a.data(), b.data(), routed.data(), 4, 4, 4);
  CHECK(max_err(scalar_out, routed) == 0.0);

  if (K::avx2_available()) {
    K::set_backend(K::Backend::avx2);
    CHECK(K::active_backend() == K::Backend::avx2);
    std::vector<cd> vec(16);
    K::matmul(a.data(), b.data(), vec.data(), 4, 4, 4);
    CHECK(max_err(scalar_out, vec) < 1e-12);
  } else {
    CHECK_THROWS_AS(K::set_backend(K::Backend::avx2), std::runtime_error);
  }

  K::set_backend(K::Backend::auto_detect);
  CHECK(K::active_backend() != K::Backend::auto_detect);
  K::set_backend(restore);
}

TEST_CASE("CMat algebra: identity, kron, dagger, trace") {
  using nmr::CMat;
  auto a = CMat::identity(3);
  auto b = CMat(3, 3);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) b(r, c) = cd(static_cast<double>(r + 1), static_cast<double>(c));
  CHECK(nmr::max_abs_diff(a * b, b) == 0.0);
  CHECK(nmr::max_abs_diff(b * a, b) == 0.0);
  CHECK(b.trace() == cd(6.0, 3.0));

  // (A kron B)(C kron D) = AC kron BD
  auto c = CMat(2, 2);
  c(0, 0) = cd(0, 1);
  c(0, 1) = 2.0;
  c(1, 0) = cd(1, -1);
  c(1, 1) = cd(0, -2);
  auto d = CMat(2, 2);
  d(0, 0) = 1.0;
  d(0, 1) = cd(3, 1);
  d(1, 0) = cd(-2, 0.5);
  d(1, 1) = 4.0;
  CHECK(nmr::max_abs_diff(nmr::kron(c, d) * nmr::kron(d, c), nmr::kron(c * d, d * c)) < 1e-12);

  // dagger is an involution and distributes contravariantly over products
  CHECK(nmr::max_abs_diff(c.dagger().dagger(), c) == 0.0);
  CHECK(nmr::max_abs_diff((c * d).dagger(), d.dagger() * c.dagger()) < 1e-12);
}
