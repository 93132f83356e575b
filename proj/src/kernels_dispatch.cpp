#include "nmr/kernels.hpp"

#include <stdexcept>

namespace nmr::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend g_backend = Backend::auto_detect;

Backend resolved() {
  if (g_backend != Backend::auto_detect) return g_backend;
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

}  // namespace

bool avx2_available() { return cpu_has_avx2() && avx2_compiled(); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available())
    throw std::runtime_error("AVX2 backend unavailable on this machine");
  g_backend = b;
}

Backend active_backend() { return resolved(); }

const char* backend_name() { return resolved() == Backend::avx2 ? "avx2" : "scalar"; }

void matmul(const cd* a, const cd* b, cd* c, std::size_t m, std::size_t k, std::size_t n) {
  if (resolved() == Backend::avx2)
    matmul_avx2(a, b, c, m, k, n);
  else
    matmul_scalar(a, b, c, m, k, n);
}

}  // namespace nmr::kernels
