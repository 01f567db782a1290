#include <cstdlib>
#include <cstring>

#include "mqheat/simd_kernels.hpp"

namespace mqheat::kernels {

namespace {

Backend detect_backend() {
    const char* env = std::getenv("MQHEAT_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return Backend::Scalar;
#if MQHEAT_HAVE_AVX2_TU
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return Backend::Avx2;
#endif
    return Backend::Scalar;
}

}  // namespace

Backend active_backend() {
    static const Backend b = detect_backend();
    return b;
}

const char* backend_name(Backend b) {
    return b == Backend::Avx2 ? "avx2" : "scalar";
}

ComposeRowStepFn compose_row_step() {
#if MQHEAT_HAVE_AVX2_TU
    if (active_backend() == Backend::Avx2) return &compose_row_step_avx2;
#endif
    return &compose_row_step_scalar;
}

ApplyRowFn apply_row() {
#if MQHEAT_HAVE_AVX2_TU
    if (active_backend() == Backend::Avx2) return &apply_row_avx2;
#endif
    return &apply_row_scalar;
}

}  // namespace mqheat::kernels
