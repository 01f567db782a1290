#include "mqheat/supertrace.hpp"

#include <cmath>

namespace mqheat {

namespace {
constexpr double kPi = 3.14159265358979323846;

// str(A w B) summed over the middle index for one diagonal entry.
double diag_supertrace_entry(const KernelField& a, const KernelField& b, int i) {
    const int n = a.points();
    const std::vector<double>& w = a.grid->weights;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        std::size_t ij = std::size_t(i) * n + j;
        std::size_t ji = std::size_t(j) * n + i;
        double s = a.plane[0][ij] * b.plane[0][ji];
        double m = a.plane[1][ij] * b.plane[1][ji] + a.plane[2][ij] * b.plane[3][ji] +
                   a.plane[3][ij] * b.plane[2][ji] + a.plane[4][ij] * b.plane[4][ji];
        double tau = a.plane[5][ij] * b.plane[5][ji];
        acc += w[j] * (s - m + tau);
    }
    return acc;
}
}  // namespace

LoopTraceReport supertrace_field(const KernelField& k) {
    LoopTraceReport rep;
    rep.t = k.t;
    const int n = k.points();
    rep.density.resize(n);
    for (int i = 0; i < n; ++i) {
        rep.density[i] = k.supertrace_at(i);
        rep.integral += k.grid->weights[i] * rep.density[i];
    }
    return rep;
}

LoopTraceReport loop_supertrace(std::shared_ptr<const QuadratureGrid> grid,
                                double total_t, int n,
                                const KernelOptions& opts, int workers) {
    LoopTraceReport rep;
    rep.t = total_t;
    rep.n = n;
    const int npts = grid->size();
    rep.density.resize(npts);

    if (n == 1) {
        KernelField k = assemble_kernel_field(grid, total_t, opts, workers);
        LoopTraceReport r = supertrace_field(k);
        r.n = 1;
        return r;
    }
    int a = n / 2, b = n - a;
    double step = total_t / n;
    KernelField ka = compose_uniform_power(grid, step * a, a, opts, workers);
    KernelField kb = (a == b)
                         ? ka
                         : compose_uniform_power(grid, step * b, b, opts, workers);
    for (int i = 0; i < npts; ++i) {
        rep.density[i] = diag_supertrace_entry(ka, kb, i);
        rep.integral += grid->weights[i] * rep.density[i];
    }
    return rep;
}

EulerDensityReport euler_form_density(std::shared_ptr<const QuadratureGrid> grid,
                                      double t, int n, const KernelOptions& opts,
                                      int workers) {
    if (grid->model->dim() != 2)
        throw std::invalid_argument("euler_form_density: needs dimension 2");
    LoopTraceReport lt = loop_supertrace(grid, t, n, opts, workers);
    EulerDensityReport rep;
    rep.density = lt.density;
    rep.integral = lt.integral;
    rep.gauss_bonnet.resize(grid->size());
    for (int i = 0; i < grid->size(); ++i) {
        rep.gauss_bonnet[i] = grid->gauss_k[i] / (2.0 * kPi);
        rep.sup_deviation = std::max(
            rep.sup_deviation, std::abs(rep.density[i] - rep.gauss_bonnet[i]));
    }
    return rep;
}

}  // namespace mqheat
