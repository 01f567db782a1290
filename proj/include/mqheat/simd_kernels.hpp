#pragma once
// Hot inner loops of kernel composition and application, on the
// structure-of-arrays plane layout of KernelField (2m = 2 blocks are
// degree-diagonal: scalar s, 2x2 M, top tau -> six double planes).
//
// Scalar reference implementations and AVX2+FMA variants; the backend is
// picked once at runtime (cpuid), overridable with MQHEAT_SIMD=scalar.
// The scalar compose path uses fused multiply-adds in the same order as the
// vector path, so the two backends agree bit for bit there; apply reduces
// in four lanes and is compared with a tolerance instead.

namespace mqheat::kernels {

enum class Backend { Scalar, Avx2 };

Backend active_backend();
const char* backend_name(Backend b);

// One block of the left factor, premultiplied by the quadrature weight.
struct BlockCoeffs {
    double s, m11, m12, m21, m22, tau;
};

struct PlaneRefs {
    const double *s, *m11, *m12, *m21, *m22, *tau;
};
struct MutPlaneRefs {
    double *s, *m11, *m12, *m21, *m22, *tau;
};

// acc[k] += a o B[k] for k in [0, count): the degree-wise product of block a
// with the contiguous run of blocks B, accumulated into acc.
using ComposeRowStepFn = void (*)(const BlockCoeffs& a, const PlaneRefs& b,
                                  const MutPlaneRefs& acc, int count);

// out[0..3] += sum_k w[k] * block[k] . (x0,x1,x2,x3)[k]  (dense row dot).
using ApplyRowFn = void (*)(const PlaneRefs& b, const double* w,
                            const double* x0, const double* x1,
                            const double* x2, const double* x3, int count,
                            double out[4]);

void compose_row_step_scalar(const BlockCoeffs& a, const PlaneRefs& b,
                             const MutPlaneRefs& acc, int count);
void apply_row_scalar(const PlaneRefs& b, const double* w, const double* x0,
                      const double* x1, const double* x2, const double* x3,
                      int count, double out[4]);

#if defined(__x86_64__) || defined(_M_X64)
#define MQHEAT_HAVE_AVX2_TU 1
void compose_row_step_avx2(const BlockCoeffs& a, const PlaneRefs& b,
                           const MutPlaneRefs& acc, int count);
void apply_row_avx2(const PlaneRefs& b, const double* w, const double* x0,
                    const double* x1, const double* x2, const double* x3,
                    int count, double out[4]);
#else
#define MQHEAT_HAVE_AVX2_TU 0
#endif

ComposeRowStepFn compose_row_step();
ApplyRowFn apply_row();

}  // namespace mqheat::kernels
