// AVX2 + FMA variants of the compose/apply inner loops. This translation
// unit is compiled with -mavx2 -mfma and only ever called after a runtime
// cpuid check (see dispatch.cpp).

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "mqheat/simd_kernels.hpp"

namespace mqheat::kernels {

void compose_row_step_avx2(const BlockCoeffs& a, const PlaneRefs& b,
                           const MutPlaneRefs& acc, int count) {
    const __m256d as = _mm256_set1_pd(a.s);
    const __m256d a11 = _mm256_set1_pd(a.m11);
    const __m256d a12 = _mm256_set1_pd(a.m12);
    const __m256d a21 = _mm256_set1_pd(a.m21);
    const __m256d a22 = _mm256_set1_pd(a.m22);
    const __m256d at = _mm256_set1_pd(a.tau);

    int k = 0;
    for (; k + 4 <= count; k += 4) {
        __m256d bs = _mm256_loadu_pd(b.s + k);
        __m256d b11 = _mm256_loadu_pd(b.m11 + k);
        __m256d b12 = _mm256_loadu_pd(b.m12 + k);
        __m256d b21 = _mm256_loadu_pd(b.m21 + k);
        __m256d b22 = _mm256_loadu_pd(b.m22 + k);
        __m256d bt = _mm256_loadu_pd(b.tau + k);

        _mm256_storeu_pd(acc.s + k,
                         _mm256_fmadd_pd(as, bs, _mm256_loadu_pd(acc.s + k)));
        _mm256_storeu_pd(
            acc.m11 + k,
            _mm256_fmadd_pd(a11, b11,
                            _mm256_fmadd_pd(a12, b21, _mm256_loadu_pd(acc.m11 + k))));
        _mm256_storeu_pd(
            acc.m12 + k,
            _mm256_fmadd_pd(a11, b12,
                            _mm256_fmadd_pd(a12, b22, _mm256_loadu_pd(acc.m12 + k))));
        _mm256_storeu_pd(
            acc.m21 + k,
            _mm256_fmadd_pd(a21, b11,
                            _mm256_fmadd_pd(a22, b21, _mm256_loadu_pd(acc.m21 + k))));
        _mm256_storeu_pd(
            acc.m22 + k,
            _mm256_fmadd_pd(a21, b12,
                            _mm256_fmadd_pd(a22, b22, _mm256_loadu_pd(acc.m22 + k))));
        _mm256_storeu_pd(acc.tau + k,
                         _mm256_fmadd_pd(at, bt, _mm256_loadu_pd(acc.tau + k)));
    }
    if (k < count)  // tail: identical fused operations, scalar width
        compose_row_step_scalar(a, PlaneRefs{b.s + k, b.m11 + k, b.m12 + k,
                                             b.m21 + k, b.m22 + k, b.tau + k},
                                MutPlaneRefs{acc.s + k, acc.m11 + k, acc.m12 + k,
                                             acc.m21 + k, acc.m22 + k, acc.tau + k},
                                count - k);
}

namespace {
inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}
}  // namespace

void apply_row_avx2(const PlaneRefs& b, const double* w, const double* x0,
                    const double* x1, const double* x2, const double* x3,
                    int count, double out[4]) {
    __m256d o0 = _mm256_setzero_pd();
    __m256d o1 = _mm256_setzero_pd();
    __m256d o2 = _mm256_setzero_pd();
    __m256d o3 = _mm256_setzero_pd();
    int k = 0;
    for (; k + 4 <= count; k += 4) {
        __m256d wk = _mm256_loadu_pd(w + k);
        __m256d v0 = _mm256_mul_pd(wk, _mm256_loadu_pd(x0 + k));
        __m256d v1 = _mm256_mul_pd(wk, _mm256_loadu_pd(x1 + k));
        __m256d v2 = _mm256_mul_pd(wk, _mm256_loadu_pd(x2 + k));
        __m256d v3 = _mm256_mul_pd(wk, _mm256_loadu_pd(x3 + k));
        o0 = _mm256_fmadd_pd(_mm256_loadu_pd(b.s + k), v0, o0);
        o1 = _mm256_fmadd_pd(_mm256_loadu_pd(b.m11 + k), v1, o1);
        o1 = _mm256_fmadd_pd(_mm256_loadu_pd(b.m12 + k), v2, o1);
        o2 = _mm256_fmadd_pd(_mm256_loadu_pd(b.m21 + k), v1, o2);
        o2 = _mm256_fmadd_pd(_mm256_loadu_pd(b.m22 + k), v2, o2);
        o3 = _mm256_fmadd_pd(_mm256_loadu_pd(b.tau + k), v3, o3);
    }
    double t0 = hsum(o0), t1 = hsum(o1), t2 = hsum(o2), t3 = hsum(o3);
    for (; k < count; ++k) {
        double wk = w[k];
        t0 += wk * b.s[k] * x0[k];
        t1 += wk * (b.m11[k] * x1[k] + b.m12[k] * x2[k]);
        t2 += wk * (b.m21[k] * x1[k] + b.m22[k] * x2[k]);
        t3 += wk * b.tau[k] * x3[k];
    }
    out[0] += t0;
    out[1] += t1;
    out[2] += t2;
    out[3] += t3;
}

}  // namespace mqheat::kernels

#endif  // x86_64
