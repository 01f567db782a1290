#pragma once
// n-fold kernel products applied to form fields:
//   K(t_1) K(t_2) ... K(t_n) alpha  ->  e^{-t Laplacian / 2} alpha
// as max_i t_i -> 0 with sum t_i = t fixed.

#include <vector>

#include "mqheat/kernel_field.hpp"

namespace mqheat {

struct Partition {
    std::vector<double> times;

    static Partition uniform(double total, int n) {
        if (n <= 0 || total <= 0.0)
            throw std::invalid_argument("Partition: need n > 0, total > 0");
        return {std::vector<double>(n, total / n)};
    }
    double total() const {
        double s = 0.0;
        for (double v : times) s += v;
        return s;
    }
    void validate() const {
        if (times.empty()) throw std::invalid_argument("empty partition");
        for (double v : times)
            if (v <= 0.0) throw std::invalid_argument("partition times must be > 0");
    }
};

struct EvolveResult {
    FormField field;
    bool under_resolved = false;
};

// Applies the per-segment kernels in order; equal consecutive times reuse
// one assembled kernel.
EvolveResult evolve(std::shared_ptr<const QuadratureGrid> grid,
                    const Partition& partition, const FormField& alpha,
                    const KernelOptions& opts = {}, int workers = 0);

// n-fold composition of the uniform partition kernel with itself, by
// repeated squaring when n is a power of two and sequential composition
// otherwise. Output is dense.
KernelField compose_uniform_power(std::shared_ptr<const QuadratureGrid> grid,
                                  double total_t, int n,
                                  const KernelOptions& opts = {},
                                  int workers = 0);

}  // namespace mqheat
