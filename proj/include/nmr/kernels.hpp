#pragma once

#include <complex>
#include <cstddef>

// Compute kernels with scalar reference implementations and SIMD variants.
// The backend is resolved once at startup from cpuid and can be overridden
// (equivalence tests pin scalar and vector results against each other).
namespace nmr::kernels {

using cd = std::complex<double>;

enum class Backend { auto_detect, scalar, avx2 };

// Selects the backend used by all kernel entry points. auto_detect picks the
// widest variant the CPU supports. Throws std::runtime_error when a forced
// backend is unavailable on this machine or was not compiled in.
void set_backend(Backend b);

// Concrete backend currently in effect (never auto_detect).
Backend active_backend();
const char* backend_name();

// True when the CPU reports AVX2+FMA and the AVX2 translation unit was built.
bool avx2_available();

// c = a * b with row-major dense complex matrices, a is m x k, b is k x n.
// c must not alias a or b.
void matmul(const cd* a, const cd* b, cd* c, std::size_t m, std::size_t k, std::size_t n);

// Implementation variants, exposed for direct equivalence testing.
void matmul_scalar(const cd* a, const cd* b, cd* c, std::size_t m, std::size_t k, std::size_t n);
void matmul_avx2(const cd* a, const cd* b, cd* c, std::size_t m, std::size_t k, std::size_t n);

// True when the AVX2 translation unit was compiled with AVX2 codegen.
bool avx2_compiled();

}  // namespace nmr::kernels
