#include "mqheat/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "mqheat/parallel.hpp"

namespace mqheat {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Fornberg finite-difference weights for derivatives 0..m at x0 on the given
// nodes; w is (m+1) x n, row d holds the weights of the d-th derivative.
void fornberg_weights(double x0, const double* x, int n, int m, double* w) {
    for (int i = 0; i < (m + 1) * n; ++i) w[i] = 0.0;
    double c1 = 1.0, c4 = x[0] - x0;
    w[0] = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0, c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    w[k * n + i] =
                        c1 * (k * w[(k - 1) * n + i - 1] - c5 * w[k * n + i - 1]) / c2;
                w[i] = -c1 * c5 * w[i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k)
                w[k * n + j] = (c4 * w[k * n + j] - k * w[(k - 1) * n + j]) / c3;
            w[j] = c4 * w[j] / c3;
        }
        c1 = c2;
    }
}

}  // namespace

// ---- Laplacian stencil --------------------------------------------------------

struct LaplacianStencil::Impl {
    ModelKind kind;
    int n0 = 0, n1 = 0;
    double a = 0.0;  // sphere radius

    // Frame -> oracle-chart conversion per point.
    std::vector<Mat2> v, v_inv_t, v_t;
    std::vector<double> det_v;

    // Oracle-chart tensors per point.
    std::vector<Mat2> ginv;
    std::vector<std::array<double, 8>> gamma;  // Gamma^c_{ab} packed c*4+a*2+b
    std::vector<Mat2> ric_mixed;               // Ric^p_e, (p, e)
    std::vector<double> r_top;                 // R_{01}^{01}

    // Sphere theta stencils: extended Gauss-Legendre nodes, 5-point weights.
    std::vector<double> th_w1, th_w2;  // n0 x 5
    // Chart stencils for both axes: window start + weights per row.
    std::vector<int> win0, win1;
    std::vector<double> ax0_w1, ax0_w2, ax1_w1, ax1_w2;
    // Uniform spacings (torus axes, sphere phi).
    double h0 = 0.0, h1 = 0.0;

    double gamma_at(int i, int c, int a_, int b) const {
        return gamma[i][c * 4 + a_ * 2 + b];
    }
};

LaplacianStencil::LaplacianStencil(std::shared_ptr<const QuadratureGrid> g)
    : grid(std::move(g)), impl_(std::make_shared<Impl>()) {
    Impl& im = *impl_;
    im.kind = grid->model->kind();
    im.n0 = grid->n0;
    im.n1 = grid->n1;
    const int n = grid->size();
    im.v.resize(n);
    im.v_t.resize(n);
    im.v_inv_t.resize(n);
    im.det_v.resize(n);
    im.ginv.resize(n);
    im.gamma.resize(n);
    im.ric_mixed.resize(n);
    im.r_top.resize(n);

    auto fill_tensors = [&](int i, const Mat2& gmat, const CurvatureData& cd) {
        Mat2 gi = gmat.inverse();
        im.ginv[i] = gi;
        for (int c = 0; c < 2; ++c)
            for (int a_ = 0; a_ < 2; ++a_)
                for (int b = 0; b < 2; ++b)
                    im.gamma[i][c * 4 + a_ * 2 + b] = cd.gamma[c][a_][b];
        // Ric^p_e = g^{ps} Ric_{se}
        im.ric_mixed[i] = gi * cd.ricci;
        // R_{01}^{01} = g^{0c} R_{01c}^{1}
        im.r_top[i] =
            gi(0, 0) * cd.riemann[0][1][0][1] + gi(0, 1) * cd.riemann[0][1][1][1];
    };

    switch (im.kind) {
        case ModelKind::FlatTorus: {
            auto* torus = static_cast<const FlatTorus*>(grid->model.get());
            im.h0 = torus->side(0) / im.n0;
            im.h1 = torus->side(1) / im.n1;
            CurvatureData flat{};
            for (int i = 0; i < n; ++i) {
                im.v[i] = im.v_t[i] = im.v_inv_t[i] = Mat2::identity();
                im.det_v[i] = 1.0;
                fill_tensors(i, Mat2::identity(), flat);
            }
            break;
        }
        case ModelKind::RoundSphere: {
            if (im.n1 % 2 != 0)
                throw std::invalid_argument(
                    "sphere Laplacian stencil needs an even longitude count");
            auto* sph = static_cast<const RoundSphere*>(grid->model.get());
            im.a = sph->radius();
            double a = im.a, k = 1.0 / (a * a);
            im.h1 = 2.0 * kPi / im.n1;
            // theta per band from the embedded points of column 0
            std::vector<double> theta(im.n0);
            for (int b = 0; b < im.n0; ++b) {
                const Vec3& x = grid->embedded[std::size_t(b) * im.n1];
                theta[b] = std::acos(std::min(1.0, std::max(-1.0, x.z / a)));
            }
            auto node = [&](int kk) {
                if (kk < 0) return -theta[-1 - kk];
                if (kk >= im.n0) return 2.0 * kPi - theta[2 * im.n0 - 1 - kk];
                return theta[kk];
            };
            im.th_w1.resize(std::size_t(im.n0) * 5);
            im.th_w2.resize(std::size_t(im.n0) * 5);
            for (int b = 0; b < im.n0; ++b) {
                double xs[5], w[15];
                for (int s = 0; s < 5; ++s) xs[s] = node(b - 2 + s);
                fornberg_weights(theta[b], xs, 5, 2, w);
                for (int s = 0; s < 5; ++s) {
                    im.th_w1[std::size_t(b) * 5 + s] = w[5 + s];
                    im.th_w2[std::size_t(b) * 5 + s] = w[10 + s];
                }
            }
            for (int b = 0; b < im.n0; ++b) {
                double st = std::sin(theta[b]), ct = std::cos(theta[b]);
                Mat2 gmat{a * a, 0.0, 0.0, a * a * st * st};
                CurvatureData cd{};
                cd.gamma[0][1][1] = -st * ct;          // Gamma^th_{ph ph}
                cd.gamma[1][0][1] = cd.gamma[1][1][0] = ct / st;
                for (int mu = 0; mu < 2; ++mu)
                    for (int nu = 0; nu < 2; ++nu)
                        for (int ga = 0; ga < 2; ++ga)
                            for (int de = 0; de < 2; ++de) {
                                double val = 0.0;
                                if (de == mu) val += k * gmat(nu, ga);
                                if (de == nu) val -= k * gmat(mu, ga);
                                cd.riemann[mu][nu][ga][de] = val;
                            }
                cd.ricci = gmat * (-k);
                for (int j = 0; j < im.n1; ++j) {
                    int i = b * im.n1 + j;
                    fill_tensors(i, gmat, cd);
                    // frame vectors in (theta, phi) components
                    double phi = 2.0 * kPi * j / im.n1;
                    Vec3 dth{a * ct * std::cos(phi), a * ct * std::sin(phi),
                             -a * st};
                    Vec3 dph{-a * st * std::sin(phi), a * st * std::cos(phi), 0.0};
                    const Vec3& e1 = grid->frame_e1[i];
                    const Vec3& e2 = grid->frame_e2[i];
                    Mat2 v{dth.dot(e1) / (a * a), dth.dot(e2) / (a * a),
                           dph.dot(e1) / (a * a * st * st),
                           dph.dot(e2) / (a * a * st * st)};
                    im.v[i] = v;
                    im.v_t[i] = v.transposed();
                    im.v_inv_t[i] = v.inverse().transposed();
                    im.det_v[i] = v.det();
                }
            }
            break;
        }
        case ModelKind::ChartMetric: {
            auto* cm = static_cast<const ChartMetric*>(grid->model.get());
            const auto& pr = cm->params();
            std::vector<double> x0(im.n0), x1(im.n1);
            for (int i = 0; i < im.n0; ++i)
                x0[i] = pr.u_min + (i + 0.5) * (pr.u_max - pr.u_min) / im.n0;
            for (int j = 0; j < im.n1; ++j)
                x1[j] = pr.v_min + (j + 0.5) * (pr.v_max - pr.v_min) / im.n1;
            auto build_axis = [](const std::vector<double>& xs, std::vector<int>* win,
                                 std::vector<double>* w1, std::vector<double>* w2) {
                int n_ = int(xs.size());
                win->resize(n_);
                w1->resize(std::size_t(n_) * 5);
                w2->resize(std::size_t(n_) * 5);
                for (int i = 0; i < n_; ++i) {
                    int lo = std::min(std::max(i - 2, 0), n_ - 5);
                    (*win)[i] = lo;
                    double w[15];
                    fornberg_weights(xs[i], xs.data() + lo, 5, 2, w);
                    for (int s = 0; s < 5; ++s) {
                        (*w1)[std::size_t(i) * 5 + s] = w[5 + s];
                        (*w2)[std::size_t(i) * 5 + s] = w[10 + s];
                    }
                }
            };
            build_axis(x0, &im.win0, &im.ax0_w1, &im.ax0_w2);
            build_axis(x1, &im.win1, &im.ax1_w1, &im.ax1_w2);
            for (int i = 0; i < n; ++i) {
                const ChartPoint& p = grid->points[i];
                fill_tensors(i, grid->model->metric(p),
                             grid->model->curvature_at(p));
                Mat2 v = grid->frames[i].vectors;
                im.v[i] = v;
                im.v_t[i] = v.transposed();
                im.v_inv_t[i] = v.inverse().transposed();
                im.det_v[i] = v.det();
            }
            break;
        }
    }
}

namespace {

using Planes = std::array<std::vector<double>, 4>;

// Pole parity of the component planes under (theta, phi) -> (-theta, phi+pi).
constexpr double kPoleParity[4] = {1.0, -1.0, 1.0, -1.0};

struct DerivOps {
    const LaplacianStencil::Impl& im;
    int n0, n1;

    double fetch_theta(const std::vector<double>& p, int band, int j,
                       double parity) const {
        if (band < 0)
            return parity * p[std::size_t(-1 - band) * n1 + (j + n1 / 2) % n1];
        if (band >= n0)
            return parity *
                   p[std::size_t(2 * n0 - 1 - band) * n1 + (j + n1 / 2) % n1];
        return p[std::size_t(band) * n1 + j];
    }

    // Derivative of one component plane along axis 0 or 1; order 1 or 2.
    std::vector<double> d(const std::vector<double>& p, int comp, int axis,
                          int order) const {
        std::vector<double> out(p.size());
        switch (im.kind) {
            case ModelKind::FlatTorus: {
                double h = axis == 0 ? im.h0 : im.h1;
                double c1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
                double c2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12,
                                -1.0 / 12};
                double* c = order == 1 ? c1 : c2;
                double scale = order == 1 ? 1.0 / h : 1.0 / (h * h);
                for (int b = 0; b < n0; ++b)
                    for (int j = 0; j < n1; ++j) {
                        double acc = 0.0;
                        for (int s = -2; s <= 2; ++s) {
                            int bb = b, jj = j;
                            if (axis == 0) bb = (b + s + n0) % n0;
                            else jj = (j + s + n1) % n1;
                            acc += c[s + 2] * p[std::size_t(bb) * n1 + jj];
                        }
                        out[std::size_t(b) * n1 + j] = acc * scale;
                    }
                return out;
            }
            case ModelKind::RoundSphere: {
                if (axis == 1) {  // periodic phi, uniform
                    double h = im.h1;
                    double c1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
                    double c2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12,
                                    -1.0 / 12};
                    double* c = order == 1 ? c1 : c2;
                    double scale = order == 1 ? 1.0 / h : 1.0 / (h * h);
                    for (int b = 0; b < n0; ++b)
                        for (int j = 0; j < n1; ++j) {
                            double acc = 0.0;
                            for (int s = -2; s <= 2; ++s)
                                acc += c[s + 2] *
                                       p[std::size_t(b) * n1 + (j + s + n1) % n1];
                            out[std::size_t(b) * n1 + j] = acc * scale;
                        }
                    return out;
                }
                const std::vector<double>& w =
                    order == 1 ? im.th_w1 : im.th_w2;
                for (int b = 0; b < n0; ++b)
                    for (int j = 0; j < n1; ++j) {
                        double acc = 0.0;
                        for (int s = 0; s < 5; ++s)
                            acc += w[std::size_t(b) * 5 + s] *
                                   fetch_theta(p, b - 2 + s, j, kPoleParity[comp]);
                        out[std::size_t(b) * n1 + j] = acc;
                    }
                return out;
            }
            case ModelKind::ChartMetric: {
                const std::vector<int>& win = axis == 0 ? im.win0 : im.win1;
                const std::vector<double>& w =
                    axis == 0 ? (order == 1 ? im.ax0_w1 : im.ax0_w2)
                              : (order == 1 ? im.ax1_w1 : im.ax1_w2);
                for (int b = 0; b < n0; ++b)
                    for (int j = 0; j < n1; ++j) {
                        int idx = axis == 0 ? b : j;
                        int lo = win[idx];
                        double acc = 0.0;
                        for (int s = 0; s < 5; ++s) {
                            int bb = axis == 0 ? lo + s : b;
                            int jj = axis == 0 ? j : lo + s;
                            acc += w[std::size_t(idx) * 5 + s] *
                                   p[std::size_t(bb) * n1 + jj];
                        }
                        out[std::size_t(b) * n1 + j] = acc;
                    }
                return out;
            }
        }
        return out;
    }
};

// Algebraic operator psi^add T[add][rem] d_rem on component planes.
void apply_gen_op(const Mat2& t, const double in[4], double out[4]) {
    out[0] = 0.0;
    out[1] = t(0, 0) * in[1] + t(0, 1) * in[2];
    out[2] = t(1, 0) * in[1] + t(1, 1) * in[2];
    out[3] = t.trace() * in[3];
}

}  // namespace

FormField LaplacianStencil::operator()(const FormField& alpha) const {
    const Impl& im = *impl_;
    const int n = grid->size();
    if (alpha.grid.get() != grid.get())
        throw std::invalid_argument("laplace_beltrami: field on a different grid");

    // frame components -> oracle-chart components
    Planes f;
    for (auto& p : f) p.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        f[0][i] = alpha.comp[0][i];
        Vec2 om = im.v_inv_t[i] * Vec2{alpha.comp[1][i], alpha.comp[2][i]};
        f[1][i] = om.x;
        f[2][i] = om.y;
        f[3][i] = alpha.comp[3][i] / im.det_v[i];
    }

    DerivOps ops{im, im.n0, im.n1};

    // covariant derivative planes nabla_mu f, and their derivatives
    Planes cov[2];
    Planes raw_d[2];
    for (int mu = 0; mu < 2; ++mu) {
        for (int c = 0; c < 4; ++c) raw_d[mu][c] = ops.d(f[c], c, mu, 1);
        for (int c = 0; c < 4; ++c) cov[mu][c].assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            Mat2 t{im.gamma_at(i, 0, mu, 0), im.gamma_at(i, 0, mu, 1),
                   im.gamma_at(i, 1, mu, 0), im.gamma_at(i, 1, mu, 1)};
            // T[add=nu][rem=eta] = Gamma^eta_{mu nu}
            Mat2 tt{im.gamma_at(i, 0, mu, 0), im.gamma_at(i, 1, mu, 0),
                    im.gamma_at(i, 0, mu, 1), im.gamma_at(i, 1, mu, 1)};
            (void)t;
            double in[4] = {f[0][i], f[1][i], f[2][i], f[3][i]};
            double g[4];
            apply_gen_op(tt, in, g);
            for (int c = 0; c < 4; ++c)
                cov[mu][c][i] = raw_d[mu][c][i] - g[c];
        }
    }

    FormField out(grid);
    Planes delta;
    for (auto& p : delta) p.assign(n, 0.0);

    // second covariant derivatives, assembled row by row
    for (int mu = 0; mu < 2; ++mu) {
        Planes d_cov;  // d_mu (cov_nu) for both nu, reused per nu below
        for (int nu = 0; nu < 2; ++nu) {
            for (int c = 0; c < 4; ++c) d_cov[c] = ops.d(cov[nu][c], c, mu, 1);
            for (int i = 0; i < n; ++i) {
                double gmn = im.ginv[i](mu, nu);
                if (gmn == 0.0) continue;
                Mat2 tt{im.gamma_at(i, 0, mu, 0), im.gamma_at(i, 1, mu, 0),
                        im.gamma_at(i, 0, mu, 1), im.gamma_at(i, 1, mu, 1)};
                double in[4] = {cov[nu][0][i], cov[nu][1][i], cov[nu][2][i],
                                cov[nu][3][i]};
                double g[4];
                apply_gen_op(tt, in, g);
                for (int c = 0; c < 4; ++c) {
                    double second = d_cov[c][i] - g[c];  // nabla_mu nabla_nu
                    double first = 0.0;
                    for (int sg = 0; sg < 2; ++sg)
                        first += im.gamma_at(i, sg, mu, nu) * cov[sg][c][i];
                    delta[c][i] += -gmn * (second - first);
                }
            }
        }
    }

    // algebraic curvature terms
    for (int i = 0; i < n; ++i) {
        double in[4] = {f[0][i], f[1][i], f[2][i], f[3][i]};
        // -Ric^p_e psi^e d_p: T[add=e][rem=p] = Ric^p_e
        Mat2 t{im.ric_mixed[i](0, 0), im.ric_mixed[i](1, 0),
               im.ric_mixed[i](0, 1), im.ric_mixed[i](1, 1)};
        double g[4];
        apply_gen_op(t, in, g);
        for (int c = 0; c < 4; ++c) delta[c][i] -= g[c];
        // -(1/2) R psi psi d d acts on the top component as +2 R_{01}^{01}
        delta[3][i] += 2.0 * im.r_top[i] * in[3];
    }

    // back to frame components
    for (int i = 0; i < n; ++i) {
        out.comp[0][i] = delta[0][i];
        Vec2 om = im.v_t[i] * Vec2{delta[1][i], delta[2][i]};
        out.comp[1][i] = om.x;
        out.comp[2][i] = om.y;
        out.comp[3][i] = delta[3][i] * im.det_v[i];
    }
    return out;
}

FormField laplace_beltrami(const FormField& alpha) {
    LaplacianStencil st(alpha.grid);
    return st(alpha);
}

// ---- exact kernels -------------------------------------------------------------

double torus_theta_kernel(const FlatTorus& torus, const Vec2& delta, double t) {
    double l1 = torus.side(0), l2 = torus.side(1);
    double reach = 8.0 * std::sqrt(t);
    int k1 = int(std::ceil((reach + 0.5 * l1) / l1));
    int k2 = int(std::ceil((reach + 0.5 * l2) / l2));
    double acc = 0.0;
    for (int i = -k1; i <= k1; ++i)
        for (int j = -k2; j <= k2; ++j) {
            double dx = delta.x + i * l1, dy = delta.y + j * l2;
            acc += std::exp(-(dx * dx + dy * dy) / (2.0 * t));
        }
    return acc / (2.0 * kPi * t);
}

std::vector<double> torus_theta_apply(const QuadratureGrid& grid, double t,
                                      const std::vector<double>& scalar) {
    auto* torus = static_cast<const FlatTorus*>(grid.model.get());
    const int n = grid.size();
    std::vector<double> out(n, 0.0);
    parallel_ranges(n, default_workers(), [&](int b, int e) {
        for (int i = b; i < e; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                Vec2 d = torus->min_image(grid.points[i], grid.points[j]);
                acc += grid.weights[j] * torus_theta_kernel(*torus, d, t) *
                       scalar[j];
            }
            out[i] = acc;
        }
    });
    return out;
}

void legendre_all(int lmax, double u, std::vector<double>* p,
                  std::vector<double>* dp, std::vector<double>* ddp) {
    p->assign(lmax + 1, 0.0);
    if (dp) dp->assign(lmax + 1, 0.0);
    if (ddp) ddp->assign(lmax + 1, 0.0);
    (*p)[0] = 1.0;
    if (lmax >= 1) (*p)[1] = u;
    if (dp && lmax >= 1) (*dp)[1] = 1.0;
    for (int l = 2; l <= lmax; ++l) {
        (*p)[l] = ((2.0 * l - 1.0) * u * (*p)[l - 1] - (l - 1.0) * (*p)[l - 2]) / l;
        if (dp) (*dp)[l] = (*dp)[l - 2] + (2.0 * l - 1.0) * (*p)[l - 1];
        if (ddp) (*ddp)[l] = (*ddp)[l - 2] + (2.0 * l - 1.0) * (*dp)[l - 1];
    }
}

namespace {
int sphere_lmax(double t_over_a2) {
    // exp(-l(l+1) s / 2) falls below 1e-16 relative once l(l+1) s/2 > 40.
    int l = int(std::ceil(std::sqrt(80.0 / t_over_a2))) + 4;
    return std::min(l, 512);
}
}  // namespace

double sphere_heat_kernel_scalar(const RoundSphere& sph, double geo_dist,
                                 double t) {
    double a = sph.radius();
    double s = t / (a * a);
    double u = std::cos(geo_dist / a);
    int lmax = sphere_lmax(s);
    std::vector<double> p;
    legendre_all(lmax, u, &p, nullptr, nullptr);
    double acc = 0.0;
    for (int l = 0; l <= lmax; ++l)
        acc += (2.0 * l + 1.0) * std::exp(-0.5 * l * (l + 1.0) * s) * p[l];
    return acc / (4.0 * kPi * a * a);
}

Mat2 sphere_heat_kernel_oneform(const QuadratureGrid& grid, int i, int j,
                                double t) {
    auto* sph = static_cast<const RoundSphere*>(grid.model.get());
    double a = sph->radius();
    double s = t / (a * a);
    const Vec3& x = grid.embedded[i];
    const Vec3& y = grid.embedded[j];
    double u = x.dot(y) / (a * a);
    Vec3 sx = (y - x * u) * (1.0 / (a * a));  // grad_x of (x.y)/a^2, tangent at x
    Vec3 sy = (x - y * u) * (1.0 / (a * a));
    Vec3 ex[2] = {grid.frame_e1[i], grid.frame_e2[i]};
    Vec3 ey[2] = {grid.frame_e1[j], grid.frame_e2[j]};
    Vec3 jx[2] = {x.cross(ex[0]) * (1.0 / a), x.cross(ex[1]) * (1.0 / a)};
    Vec3 jy[2] = {y.cross(ey[0]) * (1.0 / a), y.cross(ey[1]) * (1.0 / a)};

    int lmax = sphere_lmax(s);
    std::vector<double> p, dp, ddp;
    legendre_all(lmax, u, &p, &dp, &ddp);
    Mat2 m = Mat2::zero();
    for (int l = 1; l <= lmax; ++l) {
        double lam = l * (l + 1.0) / (a * a);
        double c = std::exp(-0.5 * lam * t) * (2.0 * l + 1.0) /
                   (4.0 * kPi * a * a * lam);
        for (int aa = 0; aa < 2; ++aa)
            for (int bb = 0; bb < 2; ++bb) {
                double grad = ddp[l] * (ex[aa].dot(sx)) * (ey[bb].dot(sy)) +
                              dp[l] * ex[aa].dot(ey[bb]) / (a * a);
                double rot = ddp[l] * (jx[aa].dot(sx)) * (jy[bb].dot(sy)) +
                             dp[l] * jx[aa].dot(jy[bb]) / (a * a);
                m(aa, bb) += c * (grad + rot);
            }
    }
    return m;
}

DegreeBlocks exact_heat_kernel(const QuadratureGrid& grid, int i, int j,
                               double t) {
    DegreeBlocks b;
    switch (grid.model->kind()) {
        case ModelKind::FlatTorus: {
            auto* torus = static_cast<const FlatTorus*>(grid.model.get());
            double v = torus_theta_kernel(
                *torus, torus->min_image(grid.points[i], grid.points[j]), t);
            b.s = v;
            b.m = Mat2::identity() * v;
            b.tau = v;
            return b;
        }
        case ModelKind::RoundSphere: {
            auto* sph = static_cast<const RoundSphere*>(grid.model.get());
            double v = sphere_heat_kernel_scalar(
                *sph, grid_pair_distance(grid, i, j), t);
            b.s = v;
            b.tau = v;
            b.m = sphere_heat_kernel_oneform(grid, i, j, t);
            return b;
        }
        default:
            throw std::invalid_argument(
                "exact_heat_kernel: no closed form for chart metrics");
    }
}

// ---- short-time checks -----------------------------------------------------------

std::vector<CheckPoint> generator_check(std::shared_ptr<const QuadratureGrid> grid,
                                        const FormField& alpha,
                                        const std::vector<double>& ts,
                                        const KernelOptions& opts, int workers) {
    LaplacianStencil stencil(grid);
    FormField half_lap = stencil(alpha) * 0.5;
    std::vector<CheckPoint> out;
    for (double t : ts) {
        KernelField kf = assemble_kernel_field(grid, t, opts, workers);
        FormField ka = apply(kf, alpha, workers);
        FormField residual = (ka - alpha) * (1.0 / t) + half_lap;
        out.push_back({t, residual.sup_norm()});
    }
    return out;
}

std::vector<CheckPoint> delta_convergence_check(
    std::shared_ptr<const QuadratureGrid> grid, const FormField& alpha,
    const std::vector<double>& ts, const KernelOptions& opts, int workers) {
    std::vector<CheckPoint> out;
    for (double t : ts) {
        KernelField kf = assemble_kernel_field(grid, t, opts, workers);
        FormField back = apply_transpose(kf, alpha, workers);
        out.push_back({t, sup_distance(back, alpha)});
    }
    return out;
}

// ---- normal-coordinate residuals ---------------------------------------------------

namespace {

// g_ab at normal coordinate x (frame-based), by differencing the chart map.
Mat2 rnc_metric_at(const ManifoldModel& model, const ChartPoint& center,
                   const Mat2& frame_vectors, const Vec2& xvec) {
    double eps = 1e-6 * std::max(1.0, xvec.norm());
    ChartPoint base = model.exp_map(center, frame_vectors * xvec);
    Mat2 g = model.metric(base);
    Mat2 jac;
    for (int a = 0; a < 2; ++a) {
        Vec2 e = a == 0 ? Vec2{eps, 0.0} : Vec2{0.0, eps};
        ChartPoint pp = model.exp_map(center, frame_vectors * (xvec + e));
        ChartPoint pm = model.exp_map(center, frame_vectors * (xvec - e));
        if (pp.chart_id != base.chart_id || pm.chart_id != base.chart_id)
            throw std::runtime_error("rnc_metric_at: chart seam hit");
        Vec2 col = model.chart_difference(pm, pp) * (1.0 / (2.0 * eps));
        jac(0, a) = col.x;
        jac(1, a) = col.y;
    }
    // g_ab = J_a . g . J_b
    Mat2 out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Vec2 ja{jac(0, a), jac(1, a)}, jb{jac(0, b), jac(1, b)};
            out(a, b) = ja.dot(g * jb);
        }
    return out;
}

}  // namespace

RncSample rnc_sample(const ManifoldModel& model, const ChartPoint& center,
                     const Vec2& dir, double d) {
    Frame f = model.frame_at(center);
    Vec2 x = dir * d;
    RncSample s;
    s.metric = rnc_metric_at(model, center, f.vectors, x);
    s.metric_inv = s.metric.inverse();
    s.sqrt_det = std::sqrt(s.metric.det());
    // Christoffels from 4th-order differences of the normal-coordinate metric.
    double h = std::max(1e-3, 1e-2 * d);
    Mat2 dg[2];
    for (int axis = 0; axis < 2; ++axis) {
        Vec2 e = axis == 0 ? Vec2{h, 0.0} : Vec2{0.0, h};
        Mat2 g2p = rnc_metric_at(model, center, f.vectors, x + e * 2.0);
        Mat2 g1p = rnc_metric_at(model, center, f.vectors, x + e);
        Mat2 g1m = rnc_metric_at(model, center, f.vectors, x - e);
        Mat2 g2m = rnc_metric_at(model, center, f.vectors, x - e * 2.0);
        dg[axis] = (g1p - g1m) * (8.0 / (12.0 * h)) - (g2p - g2m) * (1.0 / (12.0 * h));
    }
    for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double acc = 0.0;
                for (int dd = 0; dd < 2; ++dd)
                    acc += s.metric_inv(c, dd) *
                           (dg[b](a, dd) + dg[a](b, dd) - dg[dd](a, b));
                s.gamma[c][a][b] = 0.5 * acc;
            }
    return s;
}

double rnc_metric_residual(const ManifoldModel& model, const ChartPoint& center,
                           const Vec2& dir, double d) {
    RncSample s = rnc_sample(model, center, dir, d);
    FrameCurvature rc = curvature_in_frame(model, center);
    Vec2 x = dir * d;
    double worst = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double corr = 0.0;
            for (int sg = 0; sg < 2; ++sg)
                for (int tu = 0; tu < 2; ++tu)
                    corr += rc.riemann[a][sg][b][tu] * x[sg] * x[tu];
            // lowered == mixed in frame indices; R^{a b}_{s t} = R_{a s b t}
            double predicted = (a == b ? 1.0 : 0.0) - corr / 3.0;
            worst = std::max(worst, std::abs(s.metric_inv(a, b) - predicted));
        }
    return worst;
}

double rnc_gamma_residual(const ManifoldModel& model, const ChartPoint& center,
                          const Vec2& dir, double d) {
    RncSample s = rnc_sample(model, center, dir, d);
    FrameCurvature rc = curvature_in_frame(model, center);
    Vec2 x = dir * d;
    double worst = 0.0;
    for (int de = 0; de < 2; ++de)
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c) {
                double pred = 0.0;
                for (int nu = 0; nu < 2; ++nu)
                    pred += (rc.riemann[a][nu][c][de] + rc.riemann[c][nu][a][de]) *
                            x[nu];
                pred *= -1.0 / 3.0;
                worst = std::max(worst, std::abs(s.gamma[de][a][c] - pred));
            }
    return worst;
}

double rndet_residual(const ManifoldModel& model, const ChartPoint& center,
                      const Vec2& dir, double d) {
    RncSample s = rnc_sample(model, center, dir, d);
    FrameCurvature rc = curvature_in_frame(model, center);
    Vec2 x = dir * d;
    double predicted = 1.0 + x.dot(rc.ricci * x) / 6.0;
    return std::abs(s.sqrt_det - predicted);
}

double flat_gaussian_residual(double t) {
    auto f = [](double y1, double y2) {
        return std::cos(0.9 * y1 + 0.2) * std::cos(1.3 * y2 - 0.4);
    };
    double lap0 = (0.9 * 0.9 + 1.3 * 1.3) * f(0.0, 0.0);  // -dd f at 0
    double reach = 8.0 * std::sqrt(t);
    int n = 160;
    double h = 2.0 * reach / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double y1 = -reach + (i + 0.5) * h;
            double y2 = -reach + (j + 0.5) * h;
            acc += std::exp(-(y1 * y1 + y2 * y2) / (2.0 * t)) * f(y1, y2);
        }
    acc *= h * h / (2.0 * kPi * t);
    double expected = f(0.0, 0.0) - 0.5 * t * lap0;
    return std::abs(acc - expected);
}

// ---- test forms -----------------------------------------------------------------

namespace {

// Real solid harmonics and euclidean gradients, l <= 3.
double solid_harmonic(int l, int m, const Vec3& p, Vec3* grad) {
    double x = p.x, y = p.y, z = p.z;
    auto set = [&](double gx, double gy, double gz) {
        if (grad) *grad = {gx, gy, gz};
    };
    switch (l) {
        case 0:
            set(0, 0, 0);
            return 1.0;
        case 1:
            switch (m) {
                case -1: set(0, 1, 0); return y;
                case 0: set(0, 0, 1); return z;
                default: set(1, 0, 0); return x;
            }
        case 2:
            switch (m) {
                case -2: set(y, x, 0); return x * y;
                case -1: set(0, z, y); return y * z;
                case 0: set(-2 * x, -2 * y, 4 * z); return 2 * z * z - x * x - y * y;
                case 1: set(z, 0, x); return x * z;
                default: set(2 * x, -2 * y, 0); return x * x - y * y;
            }
        case 3:
            switch (m) {
                case -3: set(6 * x * y, 3 * (x * x - y * y), 0);
                    return 3 * x * x * y - y * y * y;
                case -2: set(y * z, x * z, x * y); return x * y * z;
                case -1: set(-2 * x * y, 4 * z * z - x * x - 3 * y * y, 8 * y * z);
                    return y * (4 * z * z - x * x - y * y);
                case 0: set(-6 * x * z, -6 * y * z, 6 * z * z - 3 * (x * x + y * y));
                    return z * (2 * z * z - 3 * (x * x + y * y));
                case 1: set(4 * z * z - 3 * x * x - y * y, -2 * x * y, 8 * x * z);
                    return x * (4 * z * z - x * x - y * y);
                case 2: set(2 * x * z, -2 * y * z, x * x - y * y);
                    return z * (x * x - y * y);
                default: set(3 * (x * x - y * y), -6 * x * y, 0);
                    return x * x * x - 3 * x * y * y;
            }
        default:
            throw std::invalid_argument("solid_harmonic: l must be <= 3");
    }
}

}  // namespace

FormField sphere_harmonic_0form(std::shared_ptr<const QuadratureGrid> grid,
                                int l, int m) {
    FormField out(grid);
    for (int i = 0; i < grid->size(); ++i)
        out.comp[0][i] = solid_harmonic(l, m, grid->embedded[i], nullptr);
    return out;
}

FormField sphere_harmonic_exact_1form(std::shared_ptr<const QuadratureGrid> grid,
                                      int l, int m) {
    FormField out(grid);
    for (int i = 0; i < grid->size(); ++i) {
        Vec3 g;
        solid_harmonic(l, m, grid->embedded[i], &g);
        out.comp[1][i] = g.dot(grid->frame_e1[i]);
        out.comp[2][i] = g.dot(grid->frame_e2[i]);
    }
    return out;
}

FormField sphere_harmonic_coexact_1form(
    std::shared_ptr<const QuadratureGrid> grid, int l, int m) {
    auto* sph = static_cast<const RoundSphere*>(grid->model.get());
    double a = sph->radius();
    FormField out(grid);
    for (int i = 0; i < grid->size(); ++i) {
        Vec3 g;
        solid_harmonic(l, m, grid->embedded[i], &g);
        const Vec3& x = grid->embedded[i];
        out.comp[1][i] = g.dot(x.cross(grid->frame_e1[i]) * (1.0 / a));
        out.comp[2][i] = g.dot(x.cross(grid->frame_e2[i]) * (1.0 / a));
    }
    return out;
}

FormField sphere_harmonic_2form(std::shared_ptr<const QuadratureGrid> grid,
                                int l, int m) {
    FormField out(grid);
    for (int i = 0; i < grid->size(); ++i)
        out.comp[3][i] = solid_harmonic(l, m, grid->embedded[i], nullptr);
    return out;
}

FormField torus_fourier_form(std::shared_ptr<const QuadratureGrid> grid, int kx,
                             int ky, int component, double phase) {
    auto* torus = static_cast<const FlatTorus*>(grid->model.get());
    FormField out(grid);
    for (int i = 0; i < grid->size(); ++i) {
        const Vec2& c = grid->points[i].coords;
        out.comp[component][i] = std::cos(
            2.0 * kPi * (kx * c.x / torus->side(0) + ky * c.y / torus->side(1)) +
            phase);
    }
    return out;
}

FormField torus_fourier_0form(std::shared_ptr<const QuadratureGrid> grid, int kx,
                              int ky, double phase) {
    return torus_fourier_form(std::move(grid), kx, ky, 0, phase);
}

}  // namespace mqheat
