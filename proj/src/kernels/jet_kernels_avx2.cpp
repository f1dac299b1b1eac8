// AVX2/FMA variant of the truncated-series product. Compiled with -mavx2
// -mfma in its own translation unit; selected at runtime via
// kernels::jet_mul().

#if defined(__x86_64__)

#include <immintrin.h>

#include "weylab/jet/kernels.hpp"

namespace weylab::kernels {

void jet_mul_avx2(const int32_t* offs, const int32_t* pairs, int n_out,
                  const double* a, const double* b, double* out) {
    for (int k = 0; k < n_out; ++k) {
        const int32_t begin = offs[k];
        const int32_t end = offs[k + 1];
        int32_t i = begin;
        __m256d acc = _mm256_setzero_pd();
        for (; i + 4 <= end; i += 4) {
            // pairs holds interleaved (a,b) indices; split with a strided
            // gather on each stream.
            const __m128i ia = _mm_setr_epi32(pairs[2 * i], pairs[2 * i + 2],
                                              pairs[2 * i + 4], pairs[2 * i + 6]);
            const __m128i ib = _mm_setr_epi32(pairs[2 * i + 1], pairs[2 * i + 3],
                                              pairs[2 * i + 5], pairs[2 * i + 7]);
            const __m256d va = _mm256_i32gather_pd(a, ia, 8);
            const __m256d vb = _mm256_i32gather_pd(b, ib, 8);
            acc = _mm256_fmadd_pd(va, vb, acc);
        }
        const __m128d lo = _mm256_castpd256_pd128(acc);
        const __m128d hi = _mm256_extractf128_pd(acc, 1);
        const __m128d sum2 = _mm_add_pd(lo, hi);
        double sum = _mm_cvtsd_f64(_mm_add_sd(sum2, _mm_unpackhi_pd(sum2, sum2)));
        for (; i < end; ++i) sum += a[pairs[2 * i]] * b[pairs[2 * i + 1]];
        out[k] = sum;
    }
}

}  // namespace weylab::kernels

#endif  // __x86_64__
