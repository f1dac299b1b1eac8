#pragma once

#include <cstdint>

namespace weylab::kernels {

// Truncated multivariate Taylor-series product: for each output coefficient k,
// out[k] = sum over the pair run [offs[k], offs[k+1]) of a[pairs[2*i]] *
// b[pairs[2*i+1]]. `pairs` is the flattened (a,b) table from JetLayout.
using JetMulFn = void (*)(const int32_t* offs, const int32_t* pairs, int n_out,
                          const double* a, const double* b, double* out);

void jet_mul_scalar(const int32_t* offs, const int32_t* pairs, int n_out,
                    const double* a, const double* b, double* out);

#if defined(__x86_64__)
void jet_mul_avx2(const int32_t* offs, const int32_t* pairs, int n_out,
                  const double* a, const double* b, double* out);
#endif

// Runtime-selected best variant for this machine (resolved once).
JetMulFn jet_mul();

// "scalar", "avx2", ... for diagnostics.
const char* jet_mul_kernel_name();

}  // namespace weylab::kernels
