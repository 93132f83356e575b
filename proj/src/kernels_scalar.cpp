#include "nmr/kernels.hpp"

#include <algorithm>

namespace nmr::kernels {

// i-k-j loop order: streams one row of b against an accumulating row of c,
// which keeps both in cache for the 2^n <= 128 sizes used here.
void matmul_scalar(const cd* a, const cd* b, cd* c, std::size_t m, std::size_t k, std::size_t n) {
  std::fill(c, c + m * n, cd(0.0));
  for (std::size_t i = 0; i < m; ++i) {
    cd* crow = c + i * n;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const cd aik = a[i * k + kk];
      if (aik == cd(0.0)) continue;
      const cd* brow = b + kk * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

}  // namespace nmr::kernels
