#pragma once
// Loop-space diagonal: identify x with y, take the alternating-sign trace of
// the composed kernel fiber-wise, integrate over the manifold. The integral
// recovers the Euler characteristic.

#include <vector>

#include "mqheat/evolve.hpp"
#include "mqheat/kernel_field.hpp"

namespace mqheat {

struct LoopTraceReport {
    double t = 0.0;
    int n = 0;  // partition size
    std::vector<double> density;  // supertrace per grid point
    double integral = 0.0;
    int target_chi = 0;
};

// density[i] = str ops[i][i]; integral = sum_i w_i density[i].
LoopTraceReport supertrace_field(const KernelField& k);

// Supertrace of the n-fold uniform product without forming the last
// composition: diag(K^{2q}) from K^q when n = 2q, otherwise one final
// sparse-against-dense diagonal sweep.
LoopTraceReport loop_supertrace(std::shared_ptr<const QuadratureGrid> grid,
                                double total_t, int n,
                                const KernelOptions& opts = {}, int workers = 0);

// The n-step supertrace density next to the Gauss-Bonnet integrand
// K/(2 pi); their sup distance is reported for convergence studies.
struct EulerDensityReport {
    std::vector<double> density;       // measured supertrace density
    std::vector<double> gauss_bonnet;  // K/(2 pi) per point
    double integral = 0.0;
    double sup_deviation = 0.0;
};
EulerDensityReport euler_form_density(std::shared_ptr<const QuadratureGrid> grid,
                                      double t, int n,
                                      const KernelOptions& opts = {},
                                      int workers = 0);

}  // namespace mqheat
