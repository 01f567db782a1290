#include <cmath>

#include "mqheat/simd_kernels.hpp"

namespace mqheat::kernels {

void compose_row_step_scalar(const BlockCoeffs& a, const PlaneRefs& b,
                             const MutPlaneRefs& acc, int count) {
    for (int k = 0; k < count; ++k) {
        acc.s[k] = std::fma(a.s, b.s[k], acc.s[k]);
        acc.m11[k] = std::fma(a.m11, b.m11[k], std::fma(a.m12, b.m21[k], acc.m11[k]));
        acc.m12[k] = std::fma(a.m11, b.m12[k], std::fma(a.m12, b.m22[k], acc.m12[k]));
        acc.m21[k] = std::fma(a.m21, b.m11[k], std::fma(a.m22, b.m21[k], acc.m21[k]));
        acc.m22[k] = std::fma(a.m21, b.m12[k], std::fma(a.m22, b.m22[k], acc.m22[k]));
        acc.tau[k] = std::fma(a.tau, b.tau[k], acc.tau[k]);
    }
}

void apply_row_scalar(const PlaneRefs& b, const double* w, const double* x0,
                      const double* x1, const double* x2, const double* x3,
                      int count, double out[4]) {
    double o0 = 0.0, o1 = 0.0, o2 = 0.0, o3 = 0.0;
    for (int k = 0; k < count; ++k) {
        double wk = w[k];
        o0 += wk * b.s[k] * x0[k];
        o1 += wk * (b.m11[k] * x1[k] + b.m12[k] * x2[k]);
        o2 += wk * (b.m21[k] * x1[k] + b.m22[k] * x2[k]);
        o3 += wk * b.tau[k] * x3[k];
    }
    out[0] += o0;
    out[1] += o1;
    out[2] += o2;
    out[3] += o3;
}

}  // namespace mqheat::kernels
