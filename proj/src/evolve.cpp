#include "mqheat/evolve.hpp"

namespace mqheat {

EvolveResult evolve(std::shared_ptr<const QuadratureGrid> grid,
                    const Partition& partition, const FormField& alpha,
                    const KernelOptions& opts, int workers) {
    partition.validate();
    EvolveResult res;
    res.field = alpha;
    KernelField kf;
    double cached_t = -1.0;
    for (double ti : partition.times) {
        if (ti != cached_t) {
            kf = assemble_kernel_field(grid, ti, opts, workers);
            cached_t = ti;
            res.under_resolved = res.under_resolved || kf.under_resolved;
        }
        res.field = apply(kf, res.field, workers);
    }
    return res;
}

KernelField compose_uniform_power(std::shared_ptr<const QuadratureGrid> grid,
                                  double total_t, int n,
                                  const KernelOptions& opts, int workers) {
    if (n <= 0) throw std::invalid_argument("compose_uniform_power: n <= 0");
    KernelField step = assemble_kernel_field(grid, total_t / n, opts, workers);
    if (n == 1) return densify(step);
    bool pow2 = (n & (n - 1)) == 0;
    if (pow2) {
        KernelField acc = compose(step, step, workers);
        for (int m = 2; m < n; m *= 2) acc = compose(acc, acc, workers);
        return acc;
    }
    KernelField acc = densify(step);
    for (int i = 1; i < n; ++i) acc = compose(acc, step, workers);
    return acc;
}

}  // namespace mqheat
