#include "weylab/jet/kernels.hpp"

namespace weylab::kernels {

void jet_mul_scalar(const int32_t* offs, const int32_t* pairs, int n_out,
                    const double* a, const double* b, double* out) {
    for (int k = 0; k < n_out; ++k) {
        double acc = 0.0;
        for (int32_t i = offs[k]; i < offs[k + 1]; ++i)
            acc += a[pairs[2 * i]] * b[pairs[2 * i + 1]];
        out[k] = acc;
    }
}

namespace {

JetMulFn resolve() {
#if defined(__x86_64__)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return jet_mul_avx2;
#endif
    return jet_mul_scalar;
}

const char* resolve_name() {
#if defined(__x86_64__)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return "avx2";
#endif
    return "scalar";
}

}  // namespace

JetMulFn jet_mul() {
    static const JetMulFn fn = resolve();
    return fn;
}

const char* jet_mul_kernel_name() {
    static const char* name = resolve_name();
    return name;
}

}  // namespace weylab::kernels
