#pragma once
// Single-segment Mathai-Quillen kernel MQ(x,y;t): the Gaussian factor H
// times the fiber map produced by Berezin integration of
//   exp[ i<rho, psi_x - Pbar psi_y + (1/2) R(ybar, psi_x) ybar>
//        - (1/6)(ybar, Ric ybar) - (t/4)(rho, R(psi_x,psi_x) rho) ]
// with all tensors in the orthonormal frame at x and ybar the normal
// coordinates of y seen from x. The cubic remainder in ybar is dropped;
// the discrete kernel is defined as this truncation.

#include <optional>

#include "mqheat/geometry.hpp"
#include "mqheat/grassmann.hpp"
#include "mqheat/grid.hpp"

namespace mqheat {

struct KernelOptions {
    bool include_ricci_scalar = true;     // -(1/6)(ybar, Ric ybar) factor
    bool include_linear_curvature = true; // (1/2) R(ybar, psi_x) ybar term
    bool include_quadratic_rho = true;    // -(t/4)(rho, R(psi,psi) rho) term
    double gaussian_cutoff = 7.0;         // multiples of sqrt(t); keep >= 4
    // Use the pre-shift form with (1/3) R(ybar,psi_x) ybar and
    // (1/6) R(ybar, Pbar psi_y) ybar instead (no Ricci scalar); the two
    // agree to O(d^3) per segment.
    bool use_unshifted_form = false;

    void validate() const {
        if (gaussian_cutoff < 4.0)
            throw std::invalid_argument("gaussian_cutoff must be >= 4");
    }
};

struct SegmentKernel {
    ChartPoint x, y;
    double t = 0.0;
    double h_value = 0.0;  // Gaussian factor, 0 beyond injectivity radius
    FiberOperator op;      // includes the h_value scale
};

// H(x,y;t) = (2 pi t)^{-m} exp(-d^2 / 2t) within the injectivity radius,
// zero outside. Throws for t <= 0.
double gaussian_factor(const ManifoldModel& model, const ChartPoint& x,
                       const ChartPoint& y, double t);

// Reference construction through the full Grassmann/Berezin pipeline.
SegmentKernel build_mq_kernel(const ManifoldModel& model, const ChartPoint& x,
                              const ChartPoint& y, double t,
                              const KernelOptions& opts = {});

// Degree-diagonal closed form of the same kernel for 2m = 2, evaluated from
// pair geometry. In two dimensions the Berezin integral collapses to
//   scalar block  det(P)
//   1-form block  B^T adj(P)^T,  B = I - (K/2)(|ybar|^2 I - ybar ybar^T)
//   top block     det(B) + t K
// all times H * exp(+(K/6)|ybar|^2); the exponential is the -(1/6)(ybar,
// Ric ybar) factor with Ric = -K g. Equivalence with build_mq_kernel is
// enforced by tests.
struct DegreeBlocks {
    double s = 0.0;  // degree 0
    Mat2 m;          // degree 1
    double tau = 0.0;  // degree 2
};
DegreeBlocks mq_block_2d(const PairGeometry& pg, double gauss_k, double t,
                         const KernelOptions& opts, double injectivity_radius);

// Expand a degree-diagonal block into the dense 4x4 fiber operator.
FiberOperator blocks_to_operator(const DegreeBlocks& b);

// Sup-norm estimate of the integral operator K(t) on sections of the form
// (function) x (covariantly constant form), evaluated by applying each
// kernel row to the parallel extension of a constant section. Returns the
// max over sampled rows and form degrees. sample_stride thins the rows.
double check_operator_norm(const QuadratureGrid& grid, double t,
                           const KernelOptions& opts = {},
                           int sample_stride = 1);

}  // namespace mqheat
