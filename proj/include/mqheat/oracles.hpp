#pragma once
// Independent ground truths: the Laplace-Beltrami operator on forms
//   Delta = -g^{mu nu}(nabla_mu nabla_nu - Gamma^s_{mu nu} nabla_s)
//           - Ric^p_e psi^e d_p - (1/2) R_{mu e}^{nu p} psi^mu psi^e d_nu d_p
// realized with 4th-order finite differences in a model-specific oracle
// chart, exact/spectral heat kernels on the torus and sphere, and the
// short-time generator and delta-family checks.

#include <vector>

#include "mqheat/form_field.hpp"
#include "mqheat/kernel_field.hpp"

namespace mqheat {

// ---- Laplacian --------------------------------------------------------------

// Precomputed stencil data for one grid (node tables, Fornberg weights,
// frame/coordinate conversion per point).
class LaplacianStencil {
public:
    explicit LaplacianStencil(std::shared_ptr<const QuadratureGrid> grid);
    FormField operator()(const FormField& alpha) const;

    std::shared_ptr<const QuadratureGrid> grid;

    struct Impl;

private:
    std::shared_ptr<Impl> impl_;
};

// One-shot convenience wrapper.
FormField laplace_beltrami(const FormField& alpha);

// ---- exact kernels ----------------------------------------------------------

// Lattice image sum sum_k (2 pi t)^{-1} exp(-|delta + k L|^2 / 2t).
double torus_theta_kernel(const FlatTorus& torus, const Vec2& delta, double t);

// Exact heat evolution of a scalar (0-form) plane on a torus grid by
// quadrature against the theta kernel.
std::vector<double> torus_theta_apply(const QuadratureGrid& grid, double t,
                                      const std::vector<double>& scalar);

// Spectral scalar kernel on the sphere:
//   sum_l (2l+1)/(4 pi a^2) exp(-l(l+1) t / 2a^2) P_l(cos theta).
double sphere_heat_kernel_scalar(const RoundSphere& sph, double geo_dist,
                                 double t);

// 1-form kernel block between frames at two grid points, from the exact and
// coexact eigenform sums (gradients of scalar harmonics and their rotations).
Mat2 sphere_heat_kernel_oneform(const QuadratureGrid& grid, int i, int j,
                                double t);

// Matches the kernel-field block convention: degree-0 and degree-2 entries
// are the scalar spectral kernel, the middle block is the 1-form kernel.
DegreeBlocks exact_heat_kernel(const QuadratureGrid& grid, int i, int j,
                               double t);

// ---- short-time checks --------------------------------------------------------

struct CheckPoint {
    double t = 0.0;
    double residual = 0.0;
};

// || (K(t) alpha - alpha)/t + Delta alpha / 2 ||_sup over the grid for a
// decreasing t sequence (Assumption 2 of the convergence theorem).
std::vector<CheckPoint> generator_check(std::shared_ptr<const QuadratureGrid> grid,
                                        const FormField& alpha,
                                        const std::vector<double>& ts,
                                        const KernelOptions& opts = {},
                                        int workers = 0);

// || int K(x,y;t) alpha(x) dx - alpha ||_sup for a decreasing t sequence
// (Assumption 3: the kernel family tends to the diagonal delta).
std::vector<CheckPoint> delta_convergence_check(
    std::shared_ptr<const QuadratureGrid> grid, const FormField& alpha,
    const std::vector<double>& ts, const KernelOptions& opts = {},
    int workers = 0);

// ---- normal-coordinate expansion residuals -----------------------------------

// Numerical metric in normal coordinates centered at `center`, sampled at
// radius d along the frame direction `dir` (unit vector).
struct RncSample {
    Mat2 metric;        // g_ab at the sample, frame-normal coordinates
    Mat2 metric_inv;
    double sqrt_det;
    double gamma[2][2][2];  // Gamma^c_{ab} at the sample (finite differences)
};
RncSample rnc_sample(const ManifoldModel& model, const ChartPoint& center,
                     const Vec2& dir, double d);

// |g^{ab}(x) - delta^{ab} + (1/3) R^{a b}_{ s t} x^s x^t| at x = d dir.
double rnc_metric_residual(const ManifoldModel& model, const ChartPoint& center,
                           const Vec2& dir, double d);
// |Gamma^d_{ac}(x) + (1/3)[R_{a n c}^d + R_{c n a}^d] x^n| at x = d dir.
double rnc_gamma_residual(const ManifoldModel& model, const ChartPoint& center,
                          const Vec2& dir, double d);
// |det^{1/2} g(x) - 1 - (1/6) Ric_{st} x^s x^t| at x = d dir.
double rndet_residual(const ManifoldModel& model, const ChartPoint& center,
                      const Vec2& dir, double d);

// Flat Gaussian quadrature identity: |int H f - (f(0) - t (Delta f)(0)/2)|,
// which is O(t^2) for smooth f. Uses a trapezoid grid out to 8 sqrt(t).
double flat_gaussian_residual(double t);

// ---- test form builders -------------------------------------------------------

// Real spherical harmonic as a 0-form (l <= 3), via harmonic polynomials.
FormField sphere_harmonic_0form(std::shared_ptr<const QuadratureGrid> grid,
                                int l, int m);
// Its differential as a 1-form (frame components), eigenvalue l(l+1)/a^2.
FormField sphere_harmonic_exact_1form(std::shared_ptr<const QuadratureGrid> grid,
                                      int l, int m);
// Rotated gradient (coexact eigenform), same eigenvalue.
FormField sphere_harmonic_coexact_1form(
    std::shared_ptr<const QuadratureGrid> grid, int l, int m);
// f * volume form with f a spherical harmonic (l = 0 gives the volume form).
FormField sphere_harmonic_2form(std::shared_ptr<const QuadratureGrid> grid,
                                int l, int m);

// cos(2 pi (kx x / L1 + ky y / L2) + phase) as a 0-form on a torus grid.
FormField torus_fourier_0form(std::shared_ptr<const QuadratureGrid> grid, int kx,
                              int ky, double phase = 0.0);
// Same profile on a chosen degree component (flat frame).
FormField torus_fourier_form(std::shared_ptr<const QuadratureGrid> grid, int kx,
                             int ky, int component, double phase = 0.0);

// Legendre P_l(u) and first/second derivatives for |u| <= 1.
void legendre_all(int lmax, double u, std::vector<double>* p,
                  std::vector<double>* dp, std::vector<double>* ddp);

}  // namespace mqheat
