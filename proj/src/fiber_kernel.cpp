#include "mqheat/fiber_kernel.hpp"

#include <cmath>

namespace mqheat {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double gaussian_factor(const ManifoldModel& model, const ChartPoint& x,
                       const ChartPoint& y, double t) {
    if (t <= 0.0) throw std::invalid_argument("gaussian_factor: t must be > 0");
    double d = model.geodesic_distance(x, y);
    if (!(d < model.injectivity_radius())) return 0.0;
    return std::exp(-d * d / (2.0 * t)) / (2.0 * kPi * t);
}

SegmentKernel build_mq_kernel(const ManifoldModel& model, const ChartPoint& x,
                              const ChartPoint& y, double t,
                              const KernelOptions& opts) {
    if (t <= 0.0) throw std::invalid_argument("build_mq_kernel: t must be > 0");
    opts.validate();

    SegmentKernel out;
    out.x = x;
    out.y = y;
    out.t = t;
    out.op = FiberOperator(4);

    auto seg = model.log_map(x, y);
    if (!seg) return out;  // kernel vanishes beyond the injectivity radius

    Frame fx = model.frame_at(x);
    Vec2 ybar = fx.vectors.inverse() * seg->log_vector;
    auto seg_back = model.log_map(y, x);
    if (!seg_back) return out;
    Mat2 p = model.parallel_transport(*seg_back);  // frame comps at y -> at x
    FrameCurvature rc = curvature_in_frame(model, x);

    const GeneratorSet gens = kernel_generators(1);
    const int xo = gens.offset_of("psi_x");
    const int yo = gens.offset_of("psi_y");
    const int ro = gens.offset_of("rho");
    const cplx iu(0.0, 1.0);

    auto gen = [&](int idx) {
        return GrassmannElement::monomial(gens, 1u << idx, 1.0);
    };

    GrassmannElement expo(gens);
    double xcoef = opts.use_unshifted_form ? (1.0 / 3.0) : 0.5;
    for (int tau = 0; tau < 2; ++tau) {
        for (int eta = 0; eta < 2; ++eta) {
            double a = (tau == eta) ? 1.0 : 0.0;
            if (opts.include_linear_curvature) {
                double corr = 0.0;
                for (int pi = 0; pi < 2; ++pi)
                    for (int sg = 0; sg < 2; ++sg)
                        corr += rc.riemann[pi][eta][sg][tau] * ybar[pi] * ybar[sg];
                a += xcoef * corr;
            }
            if (a != 0.0) expo += wedge(gen(ro + tau), gen(xo + eta)) * (iu * a);
        }
        for (int nu = 0; nu < 2; ++nu) {
            double a = -p(tau, nu);
            if (opts.use_unshifted_form && opts.include_linear_curvature) {
                // + (1/6) R(ybar, Pbar psi_y) ybar
                double corr = 0.0;
                for (int pi = 0; pi < 2; ++pi)
                    for (int eta = 0; eta < 2; ++eta)
                        for (int sg = 0; sg < 2; ++sg)
                            corr += rc.riemann[pi][eta][sg][tau] * ybar[pi] *
                                    ybar[sg] * p(eta, nu);
                a += corr / 6.0;
            }
            if (a != 0.0) expo += wedge(gen(ro + tau), gen(yo + nu)) * (iu * a);
        }
    }
    if (opts.include_quadratic_rho) {
        for (int nu = 0; nu < 2; ++nu)
            for (int pi = 0; pi < 2; ++pi)
                for (int mu = 0; mu < 2; ++mu)
                    for (int eta = 0; eta < 2; ++eta) {
                        double r = rc.riemann[mu][eta][nu][pi];
                        if (r == 0.0) continue;
                        GrassmannElement term = wedge(
                            wedge(gen(ro + nu), gen(xo + mu)),
                            wedge(gen(xo + eta), gen(ro + pi)));
                        expo += term * (-0.25 * t * r);
                    }
    }

    out.op = to_fiber_operator(grassmann_exp(expo), 1);

    double h = gaussian_factor(model, x, y, t);
    double scale = h;
    if (opts.include_ricci_scalar && !opts.use_unshifted_form) {
        Vec2 ry = rc.ricci * ybar;
        scale *= std::exp(-ybar.dot(ry) / 6.0);
    }
    out.h_value = h;
    out.op = out.op * scale;
    return out;
}

DegreeBlocks mq_block_2d(const PairGeometry& pg, double gauss_k, double t,
                         const KernelOptions& opts, double injectivity_radius) {
    DegreeBlocks b;
    if (!(pg.dist < injectivity_radius)) return b;

    double h = std::exp(-pg.dist * pg.dist / (2.0 * t)) / (2.0 * kPi * t);
    double scale = h;
    double y2 = pg.ybar.norm2();
    if (opts.include_ricci_scalar)
        scale *= std::exp(gauss_k * y2 / 6.0);  // Ric = -K g in 2d

    Mat2 bmat = Mat2::identity();
    if (opts.include_linear_curvature) {
        Mat2 corr = (Mat2::identity() * y2 - outer(pg.ybar, pg.ybar)) *
                    (0.5 * gauss_k);
        bmat = bmat - corr;
    }
    const Mat2& p = pg.transport;
    b.s = scale * p.det();
    b.m = (bmat.transposed() * p.adjugate().transposed()) * scale;
    b.tau = scale * (bmat.det() +
                     (opts.include_quadratic_rho ? t * gauss_k : 0.0));
    return b;
}

FiberOperator blocks_to_operator(const DegreeBlocks& b) {
    FiberOperator f(4);
    f(0, 0) = b.s;
    f(1, 1) = b.m.a00;
    f(1, 2) = b.m.a01;
    f(2, 1) = b.m.a10;
    f(2, 2) = b.m.a11;
    f(3, 3) = b.tau;
    return f;
}

double check_operator_norm(const QuadratureGrid& grid, double t,
                           const KernelOptions& opts, int sample_stride) {
    if (t <= 0.0) throw std::invalid_argument("check_operator_norm: t <= 0");
    opts.validate();
    const int n = grid.size();
    const double inj = grid.model->injectivity_radius();
    const double radius = std::min(opts.gaussian_cutoff * std::sqrt(t), inj);
    double norm_est = 0.0;
    PairGeometry pg;
    for (int i = 0; i < n; i += sample_stride) {
        double nu0 = 0.0, nu2 = 0.0;
        Mat2 nu1 = Mat2::zero();
        for (int j = 0; j < n; ++j) {
            if (grid_pair_distance(grid, i, j) >= radius) continue;
            if (!grid_pair_geometry(grid, i, j, &pg)) continue;
            DegreeBlocks b = mq_block_2d(pg, grid.gauss_k[i], t, opts, inj);
            double w = grid.weights[j];
            nu0 += w * b.s;
            nu2 += w * b.tau;
            // parallel extension of a constant 1-form around x_i: frame
            // components at j are transport(i->j) = transport(j->i)^T
            nu1 = nu1 + (b.m * pg.transport.transposed()) * w;
        }
        norm_est = std::max({norm_est, std::abs(nu0), std::abs(nu2),
                             nu1.sigma_max()});
    }
    return norm_est;
}

}  // namespace mqheat
