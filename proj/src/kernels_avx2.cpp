#include "nmr/kernels.hpp"

#include <stdexcept>

#if defined(NMRQC_BUILD_AVX2)
#include <immintrin.h>

#include <algorithm>

namespace nmr::kernels {

// Complex multiply-accumulate over pairs of complex doubles per 256-bit lane.
// Lane layout [re0, im0, re1, im1]; fmaddsub yields re = ar*br - ai*bi on the
// even lanes and im = ar*bi + ai*br on the odd lanes in one fused step.
void matmul_avx2(const cd* a, const cd* b, cd* c, std::size_t m, std::size_t k, std::size_t n) {
  std::fill(c, c + m * n, cd(0.0));
  const double* bd = reinterpret_cast<const double*>(b);
  double* cdat = reinterpret_cast<double*>(c);
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = cdat + 2 * i * n;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const cd aik = a[i * k + kk];
      if (aik == cd(0.0)) continue;
      const __m256d ar = _mm256_set1_pd(aik.real());
      const __m256d ai = _mm256_set1_pd(aik.imag());
      const double* brow = bd + 2 * kk * n;
      std::size_t j = 0;
      for (; j + 2 <= n; j += 2) {
        const __m256d bv = _mm256_loadu_pd(brow + 2 * j);
        const __m256d bswap = _mm256_permute_pd(bv, 0x5);
        const __m256d prod = _mm256_fmaddsub_pd(ar, bv, _mm256_mul_pd(ai, bswap));
        const __m256d cv = _mm256_loadu_pd(crow + 2 * j);
        _mm256_storeu_pd(crow + 2 * j, _mm256_add_pd(cv, prod));
      }
      for (; j < n; ++j) c[i * n + j] += aik * b[kk * n + j];
    }
  }
}

bool avx2_compiled() { return true; }

}  // namespace nmr::kernels

#else

namespace nmr::kernels {

void matmul_avx2(const cd*, const cd*, cd*, std::size_t, std::size_t, std::size_t) {
  throw std::runtime_error("AVX2 kernel not compiled into this build");
}

bool avx2_compiled() { return false; }

}  // namespace nmr::kernels

#endif
