#include "mqheat/geometry.hpp"

#include <cmath>

namespace mqheat {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

// --- base ---------------------------------------------------------------

double ManifoldModel::geodesic_distance(const ChartPoint& p,
                                        const ChartPoint& q) const {
    auto seg = log_map(p, q);
    return seg ? seg->length : std::numeric_limits<double>::infinity();
}

Vec2 ManifoldModel::chart_difference(const ChartPoint& from,
                                     const ChartPoint& to) const {
    if (from.chart_id != to.chart_id)
        throw std::invalid_argument("chart_difference: points in different charts");
    return to.coords - from.coords;
}

Frame ManifoldModel::frame_at(const ChartPoint& p) const {
    Mat2 g = metric(p);
    // Gram-Schmidt on (d_u, d_v); upper triangular with positive diagonal,
    // hence orientation-preserving in every chart.
    double e1 = 1.0 / std::sqrt(g.a00);
    double c = -g.a01 / g.a00;
    double n2 = g.a11 + c * g.a01;  // |d_v + c d_u|^2 = det/g00
    double inv = 1.0 / std::sqrt(n2);
    Frame f;
    f.base = p;
    f.vectors = Mat2{e1, c * inv, 0.0, inv};
    return f;
}

double ManifoldModel::sqrt_det_metric(const ChartPoint& p) const {
    return std::sqrt(metric(p).det());
}

double ManifoldModel::gauss_curvature(const ChartPoint& p) const {
    return curvature_in_frame(*this, p).gauss;
}

FrameCurvature curvature_in_frame(const ManifoldModel& model, const ChartPoint& p) {
    CurvatureData cd = model.curvature_at(p);
    Frame f = model.frame_at(p);
    Mat2 e = f.vectors;
    Mat2 einv = e.inverse();
    FrameCurvature out{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                    double s = 0.0;
                    for (int mu = 0; mu < 2; ++mu)
                        for (int nu = 0; nu < 2; ++nu)
                            for (int ga = 0; ga < 2; ++ga)
                                for (int de = 0; de < 2; ++de)
                                    s += cd.riemann[mu][nu][ga][de] * e(mu, a) *
                                         e(nu, b) * e(ga, c) * einv(d, de);
                    out.riemann[a][b][c][d] = s;
                }
    out.ricci = e.transposed() * cd.ricci * e;
    out.gauss = out.riemann[0][1][1][0];  // R_{1221} in the frame
    return out;
}

// --- flat torus -----------------------------------------------------------

FlatTorus::FlatTorus(double l1, double l2) : l1_(l1), l2_(l2) {
    if (l1 <= 0.0 || l2 <= 0.0)
        throw std::invalid_argument("FlatTorus: side lengths must be positive");
}

CurvatureData FlatTorus::curvature_at(const ChartPoint& p) const {
    CurvatureData cd;
    cd.evaluated_at = p;
    cd.ricci = Mat2::zero();
    return cd;
}

ChartPoint FlatTorus::canonical(const ChartPoint& p) const {
    auto wrap = [](double x, double l) {
        double r = std::fmod(x, l);
        return r < 0.0 ? r + l : r;
    };
    return {0, {wrap(p.coords.x, l1_), wrap(p.coords.y, l2_)}};
}

Vec2 FlatTorus::min_image(const ChartPoint& p, const ChartPoint& q) const {
    return {std::remainder(q.coords.x - p.coords.x, l1_),
            std::remainder(q.coords.y - p.coords.y, l2_)};
}

ChartPoint FlatTorus::exp_map(const ChartPoint& p, const Vec2& v) const {
    if (v.norm() >= injectivity_radius())
        throw std::domain_error("exp_map: |v| exceeds injectivity radius");
    return canonical({0, p.coords + v});
}

std::optional<GeodesicSegment> FlatTorus::log_map(const ChartPoint& center,
                                                  const ChartPoint& q) const {
    Vec2 d = min_image(center, q);
    double len = d.norm();
    if (len >= injectivity_radius()) return std::nullopt;
    return GeodesicSegment{center, q, d, len};
}

// --- round sphere ----------------------------------------------------------

RoundSphere::RoundSphere(double radius) : a_(radius) {
    if (radius <= 0.0)
        throw std::invalid_argument("RoundSphere: radius must be positive");
}

double RoundSphere::conformal_lambda(const Vec2& w) const {
    return 1.0 / (1.0 + w.norm2() / (4.0 * a_ * a_));
}

bool RoundSphere::in_domain(const ChartPoint& p) const {
    if (p.chart_id != 0 && p.chart_id != 1) return false;
    // Charts reach down to latitude -pi/4 from their pole.
    const double s = std::sin(kPi / 4.0);
    double limit = 4.0 * a_ * a_ * (1.0 + s) / (1.0 - s);
    return p.coords.norm2() <= limit * (1.0 + 1e-12);
}

Mat2 RoundSphere::metric(const ChartPoint& p) const {
    if (!in_domain(p)) throw std::domain_error("RoundSphere: point outside chart");
    double lam = conformal_lambda(p.coords);
    return Mat2{lam * lam, 0.0, 0.0, lam * lam};
}

CurvatureData RoundSphere::curvature_at(const ChartPoint& p) const {
    if (!in_domain(p)) throw std::domain_error("RoundSphere: point outside chart");
    CurvatureData cd;
    cd.evaluated_at = p;
    double lam = conformal_lambda(p.coords);
    // d_mu log(lambda) = -x_mu lambda / (2 a^2)
    double lmu[2] = {-p.coords.x * lam / (2.0 * a_ * a_),
                     -p.coords.y * lam / (2.0 * a_ * a_)};
    for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double v = 0.0;
                if (c == a) v += lmu[b];
                if (c == b) v += lmu[a];
                if (a == b) v -= lmu[c];
                cd.gamma[c][a][b] = v;
            }
    // 2D identity R_{mu nu ga}^{de} = K (g_{nu ga} delta^de_mu
    //                                    - g_{mu ga} delta^de_nu)
    double k = 1.0 / (a_ * a_);
    Mat2 g = metric(p);
    for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu)
            for (int ga = 0; ga < 2; ++ga)
                for (int de = 0; de < 2; ++de) {
                    double v = 0.0;
                    if (de == mu) v += k * g(nu, ga);
                    if (de == nu) v -= k * g(mu, ga);
                    cd.riemann[mu][nu][ga][de] = v;
                }
    cd.ricci = g * (-k);
    return cd;
}

Vec3 RoundSphere::embed(const ChartPoint& p) const {
    if (!in_domain(p)) throw std::domain_error("RoundSphere: point outside chart");
    double w2 = p.coords.norm2();
    double den = 4.0 * a_ * a_ + w2;
    double x = 4.0 * a_ * a_ * p.coords.x / den;
    double y = 4.0 * a_ * a_ * p.coords.y / den;
    double z = a_ * (4.0 * a_ * a_ - w2) / den;
    if (p.chart_id == 0) return {x, y, z};
    return {x, -y, -z};
}

ChartPoint RoundSphere::from_embedding(const Vec3& x) const {
    if (x.z >= 0.0) {
        double den = a_ + x.z;
        return {0, {2.0 * a_ * x.x / den, 2.0 * a_ * x.y / den}};
    }
    double den = a_ - x.z;
    return {1, {2.0 * a_ * x.x / den, -2.0 * a_ * x.y / den}};
}

Vec3 RoundSphere::push_tangent(const ChartPoint& p, const Vec2& v) const {
    double u = p.coords.x, w = p.coords.y;
    double w2 = p.coords.norm2();
    double den = 4.0 * a_ * a_ + w2;
    double d2 = den * den;
    double c = 4.0 * a_ * a_;
    // Jacobian of the chart-0 embedding.
    double jxu = c * (den - 2.0 * u * u) / d2;
    double jxv = c * (-2.0 * u * w) / d2;
    double jyu = jxv;
    double jyv = c * (den - 2.0 * w * w) / d2;
    double jzu = -4.0 * a_ * c * u / d2;
    double jzv = -4.0 * a_ * c * w / d2;
    Vec3 out{jxu * v.x + jxv * v.y, jyu * v.x + jyv * v.y, jzu * v.x + jzv * v.y};
    if (p.chart_id == 1) {
        out.y = -out.y;
        out.z = -out.z;
    }
    return out;
}

Vec2 RoundSphere::pull_tangent(const ChartPoint& p, const Vec3& v) const {
    // g = J^T J = lambda^2 I, so the pullback is J^T v / lambda^2.
    double lam = conformal_lambda(p.coords);
    Vec3 e1 = push_tangent(p, {1.0, 0.0});
    Vec3 e2 = push_tangent(p, {0.0, 1.0});
    return {e1.dot(v) / (lam * lam), e2.dot(v) / (lam * lam)};
}

ChartPoint RoundSphere::canonical(const ChartPoint& p) const {
    return from_embedding(embed(p));
}

double RoundSphere::geodesic_distance(const ChartPoint& p,
                                      const ChartPoint& q) const {
    Vec3 x = embed(p), y = embed(q);
    double theta = std::atan2(x.cross(y).norm(), x.dot(y));
    return a_ * theta;
}

ChartPoint RoundSphere::exp_map(const ChartPoint& p, const Vec2& v) const {
    double len = norm(p, v);
    if (len >= injectivity_radius())
        throw std::domain_error("exp_map: |v| exceeds injectivity radius");
    if (len == 0.0) return p;
    Vec3 x = embed(p);
    Vec3 dir = push_tangent(p, v).normalized();
    double theta = len / a_;
    Vec3 y = x * std::cos(theta) + dir * (a_ * std::sin(theta));
    return from_embedding(y);
}

std::optional<GeodesicSegment> RoundSphere::log_map(const ChartPoint& center,
                                                    const ChartPoint& q) const {
    Vec3 x = embed(center), y = embed(q);
    double theta = std::atan2(x.cross(y).norm(), x.dot(y));
    double d = a_ * theta;
    if (d >= injectivity_radius() * (1.0 - 1e-12)) return std::nullopt;
    Vec2 v{0.0, 0.0};
    if (theta > 1e-15) {
        Vec3 t = y - x * (x.dot(y) / (a_ * a_));
        v = pull_tangent(center, t.normalized() * d);
    }
    return GeodesicSegment{center, q, v, d};
}

Mat2 RoundSphere::parallel_transport(const GeodesicSegment& seg) const {
    Vec3 x = embed(seg.start), y = embed(seg.end);
    Vec3 cr = x.cross(y);
    double sn = cr.norm();
    Frame fp = frame_at(seg.start);
    Frame fq = frame_at(seg.end);
    Vec3 fp1 = push_tangent(seg.start, {fp.vectors.a00, fp.vectors.a10});
    Vec3 fp2 = push_tangent(seg.start, {fp.vectors.a01, fp.vectors.a11});
    Vec3 fq1 = push_tangent(seg.end, {fq.vectors.a00, fq.vectors.a10});
    Vec3 fq2 = push_tangent(seg.end, {fq.vectors.a01, fq.vectors.a11});
    Vec3 t1 = fp1, t2 = fp2;
    if (sn > 1e-300) {
        double theta = std::atan2(sn, x.dot(y));
        Vec3 n = cr * (1.0 / sn);
        t1 = rotate_about(n, theta, fp1);
        t2 = rotate_about(n, theta, fp2);
    }
    return Mat2{fq1.dot(t1), fq1.dot(t2), fq2.dot(t1), fq2.dot(t2)};
}

// --- user chart metric -------------------------------------------------------

ChartMetric::ChartMetric(Params params) : params_(std::move(params)) {
    if (!params_.g11 || !params_.g12 || !params_.g22)
        throw std::invalid_argument("ChartMetric: metric functions required");
    if (params_.injectivity_radius <= 0.0)
        throw std::invalid_argument("ChartMetric: injectivity radius must be > 0");
}

bool ChartMetric::in_domain(const ChartPoint& p) const {
    if (params_.periodic) return true;
    // Slack of a few finite-difference steps so stencils can graze the edge.
    const double tol = 8.0 * fd_step();
    return p.coords.x >= params_.u_min - tol && p.coords.x <= params_.u_max + tol &&
           p.coords.y >= params_.v_min - tol && p.coords.y <= params_.v_max + tol;
}

Vec2 ChartMetric::wrap(Vec2 c) const {
    if (!params_.periodic) return c;
    double lu = params_.u_max - params_.u_min;
    double lv = params_.v_max - params_.v_min;
    c.x = params_.u_min + std::fmod(c.x - params_.u_min, lu);
    if (c.x < params_.u_min) c.x += lu;
    c.y = params_.v_min + std::fmod(c.y - params_.v_min, lv);
    if (c.y < params_.v_min) c.y += lv;
    return c;
}

Vec2 ChartMetric::chart_delta(const Vec2& from, const Vec2& to) const {
    if (!params_.periodic) return to - from;
    double lu = params_.u_max - params_.u_min;
    double lv = params_.v_max - params_.v_min;
    return {std::remainder(to.x - from.x, lu), std::remainder(to.y - from.y, lv)};
}

ChartPoint ChartMetric::canonical(const ChartPoint& p) const {
    return {0, wrap(p.coords)};
}

Mat2 ChartMetric::metric(const ChartPoint& p) const {
    if (!in_domain(p)) throw std::domain_error("ChartMetric: point outside chart");
    double u = p.coords.x, v = p.coords.y;
    Mat2 g{params_.g11(u, v), params_.g12(u, v), params_.g12(u, v),
           params_.g22(u, v)};
    if (g.a00 <= 0.0 || g.det() <= 0.0)
        throw std::domain_error("ChartMetric: metric not positive definite");
    return g;
}

namespace {
// 4th-order central difference of a Mat2-valued function.
template <typename F>
Mat2 fd4(const F& f, const Vec2& p, int axis, double h) {
    Vec2 e = axis == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    Mat2 m2 = f(p + e * (2.0 * h)), m1 = f(p + e * h);
    Mat2 n1 = f(p - e * h), n2 = f(p - e * (2.0 * h));
    return (m1 - n1) * (8.0 / (12.0 * h)) - (m2 - n2) * (1.0 / (12.0 * h));
}

void christoffel_from(const Mat2& g, const Mat2 dg[2], double gamma[2][2][2]) {
    Mat2 ginv = g.inverse();
    for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double s = 0.0;
                for (int d = 0; d < 2; ++d)
                    s += ginv(c, d) *
                         (dg[b](a, d) + dg[a](b, d) - dg[d](a, b));
                gamma[c][a][b] = 0.5 * s;
            }
}
}  // namespace

CurvatureData ChartMetric::curvature_at(const ChartPoint& p) const {
    if (!in_domain(p)) throw std::domain_error("ChartMetric: point outside chart");
    const double h = fd_step();
    auto gfun = [this](const Vec2& c) { return metric({0, c}); };
    auto gamma_at = [&](const Vec2& c) {
        Mat2 g = gfun(c);
        Mat2 dg[2] = {fd4(gfun, c, 0, h), fd4(gfun, c, 1, h)};
        double gm[2][2][2];
        christoffel_from(g, dg, gm);
        return std::array<double, 8>{gm[0][0][0], gm[0][0][1], gm[0][1][0],
                                     gm[0][1][1], gm[1][0][0], gm[1][0][1],
                                     gm[1][1][0], gm[1][1][1]};
    };

    CurvatureData cd;
    cd.evaluated_at = p;
    auto g0 = gamma_at(p.coords);
    double (*unpack)(const std::array<double, 8>&, int, int, int) =
        [](const std::array<double, 8>& a, int c, int i, int j) {
            return a[c * 4 + i * 2 + j];
        };
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) cd.gamma[c][i][j] = unpack(g0, c, i, j);

    // dGamma[mu][c][a][b] = d_mu Gamma^c_{ab}, 4th-order stencil on gamma_at.
    double dgam[2][2][2][2];
    for (int mu = 0; mu < 2; ++mu) {
        Vec2 e = mu == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
        auto a2 = gamma_at(p.coords + e * (2.0 * h));
        auto a1 = gamma_at(p.coords + e * h);
        auto b1 = gamma_at(p.coords - e * h);
        auto b2 = gamma_at(p.coords - e * (2.0 * h));
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double d = (8.0 * (unpack(a1, c, i, j) - unpack(b1, c, i, j)) -
                                (unpack(a2, c, i, j) - unpack(b2, c, i, j))) /
                               (12.0 * h);
                    dgam[mu][c][i][j] = d;
                }
    }
    for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu)
            for (int ga = 0; ga < 2; ++ga)
                for (int de = 0; de < 2; ++de) {
                    double v = dgam[mu][de][nu][ga] - dgam[nu][de][mu][ga];
                    for (int ch = 0; ch < 2; ++ch)
                        v += cd.gamma[de][mu][ch] * cd.gamma[ch][nu][ga] -
                             cd.gamma[de][nu][ch] * cd.gamma[ch][mu][ga];
                    cd.riemann[mu][nu][ga][de] = v;
                }
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) {
            double v = 0.0;
            for (int mu = 0; mu < 2; ++mu) v += cd.riemann[s][mu][t][mu];
            cd.ricci(s, t) = v;
        }
    return cd;
}

void ChartMetric::ode_rhs(const double y[8], double dy[8]) const {
    Vec2 u{y[0], y[1]}, w{y[2], y[3]};
    const double h = fd_step();
    auto gfun = [this](const Vec2& c) { return metric({0, c}); };
    Mat2 g = gfun(u);
    Mat2 dg[2] = {fd4(gfun, u, 0, h), fd4(gfun, u, 1, h)};
    double gm[2][2][2];
    christoffel_from(g, dg, gm);
    auto gammav = [&gm](const Vec2& a, const Vec2& b) {
        Vec2 out;
        for (int c = 0; c < 2; ++c) {
            double s = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) s += gm[c][i][j] * a[i] * b[j];
            out[c] = s;
        }
        return out;
    };
    Vec2 aw = gammav(w, w) * -1.0;
    Vec2 v1{y[4], y[5]}, v2{y[6], y[7]};
    Vec2 d1 = gammav(w, v1) * -1.0;
    Vec2 d2 = gammav(w, v2) * -1.0;
    dy[0] = w.x; dy[1] = w.y;
    dy[2] = aw.x; dy[3] = aw.y;
    dy[4] = d1.x; dy[5] = d1.y;
    dy[6] = d2.x; dy[7] = d2.y;
}

void ChartMetric::integrate(const Vec2& p, const Vec2& v, Vec2 carried[2],
                            int n_carried, Vec2* out_p, Vec2* out_v) const {
    double y[8] = {p.x, p.y, v.x, v.y, 0, 0, 0, 0};
    for (int c = 0; c < n_carried; ++c) {
        y[4 + 2 * c] = carried[c].x;
        y[5 + 2 * c] = carried[c].y;
    }
    const double ds = 1.0 / kGeodesicSteps;
    double k1[8], k2[8], k3[8], k4[8], tmp[8];
    for (int step = 0; step < kGeodesicSteps; ++step) {
        ode_rhs(y, k1);
        for (int i = 0; i < 8; ++i) tmp[i] = y[i] + 0.5 * ds * k1[i];
        ode_rhs(tmp, k2);
        for (int i = 0; i < 8; ++i) tmp[i] = y[i] + 0.5 * ds * k2[i];
        ode_rhs(tmp, k3);
        for (int i = 0; i < 8; ++i) tmp[i] = y[i] + ds * k3[i];
        ode_rhs(tmp, k4);
        for (int i = 0; i < 8; ++i)
            y[i] += ds / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if (out_p) *out_p = {y[0], y[1]};
    if (out_v) *out_v = {y[2], y[3]};
    for (int c = 0; c < n_carried; ++c) carried[c] = {y[4 + 2 * c], y[5 + 2 * c]};
}

ChartPoint ChartMetric::exp_map(const ChartPoint& p, const Vec2& v) const {
    if (norm(p, v) >= injectivity_radius())
        throw std::domain_error("exp_map: |v| exceeds injectivity radius");
    Vec2 out;
    integrate(p.coords, v, nullptr, 0, &out, nullptr);
    return canonical({0, out});
}

std::optional<GeodesicSegment> ChartMetric::log_map(const ChartPoint& center,
                                                    const ChartPoint& q) const {
    Vec2 v = chart_delta(center.coords, q.coords);
    double target_tol = kNewtonTol;
    bool converged = false;
    for (int it = 0; it < kNewtonMaxIter; ++it) {
        Vec2 reached;
        integrate(center.coords, v, nullptr, 0, &reached, nullptr);
        Vec2 r = chart_delta(reached, q.coords);
        if (r.norm() < target_tol) {
            converged = true;
            break;
        }
        // Finite-difference Jacobian of exp wrt v.
        double eps = 1e-6 * (1.0 + v.norm());
        Mat2 jac;
        for (int j = 0; j < 2; ++j) {
            Vec2 dv = j == 0 ? Vec2{eps, 0.0} : Vec2{0.0, eps};
            Vec2 rp, rm;
            integrate(center.coords, v + dv, nullptr, 0, &rp, nullptr);
            integrate(center.coords, v - dv, nullptr, 0, &rm, nullptr);
            Vec2 col = chart_delta(rm, rp) * (1.0 / (2.0 * eps));
            jac(0, j) = col.x;
            jac(1, j) = col.y;
        }
        v += jac.inverse() * r;
        if (norm(center, v) > 2.0 * injectivity_radius())
            return std::nullopt;  // diverging outside the trusted region
    }
    if (!converged)
        throw std::runtime_error("log_map: Newton iteration did not converge");
    double len = norm(center, v);
    if (len >= injectivity_radius()) return std::nullopt;
    return GeodesicSegment{center, q, v, len};
}

Mat2 ChartMetric::parallel_transport(const GeodesicSegment& seg) const {
    Frame fs = frame_at(seg.start);
    Vec2 cols[2] = {{fs.vectors.a00, fs.vectors.a10},
                    {fs.vectors.a01, fs.vectors.a11}};
    Vec2 endp;
    integrate(seg.start.coords, seg.log_vector, cols, 2, &endp, nullptr);
    Frame fe = frame_at({0, endp});
    Mat2 einv = fe.vectors.inverse();
    Vec2 c1 = einv * cols[0];
    Vec2 c2 = einv * cols[1];
    return Mat2{c1.x, c2.x, c1.y, c2.y};
}

// --- expansion checks ---------------------------------------------------------

double pt_expansion_check(const ManifoldModel& model, const ChartPoint& center,
                          const ChartPoint& q, const Vec2& v_frame_at_q) {
    auto seg = model.log_map(center, q);
    if (!seg) throw std::domain_error("pt_expansion_check: q beyond injectivity");
    Frame fc = model.frame_at(center);
    Frame fq = model.frame_at(q);
    Mat2 ec = fc.vectors, eq = fq.vectors;

    // Differential of exp_center at the preimage of q, in frame components.
    double eps = 1e-6 * std::max(1.0, seg->length);
    Mat2 dexp_chart;
    for (int j = 0; j < 2; ++j) {
        Vec2 dv = j == 0 ? Vec2{eps, 0.0} : Vec2{0.0, eps};
        ChartPoint pp = model.exp_map(center, seg->log_vector + dv);
        ChartPoint pm = model.exp_map(center, seg->log_vector - dv);
        if (pp.chart_id != q.chart_id || pm.chart_id != q.chart_id)
            throw std::runtime_error("pt_expansion_check: chart mismatch in FD");
        Vec2 col = model.chart_difference(pm, pp) * (1.0 / (2.0 * eps));
        dexp_chart(0, j) = col.x;
        dexp_chart(1, j) = col.y;
    }
    Mat2 dexp_frame = eq.inverse() * dexp_chart * ec;

    Vec2 vec_v = dexp_frame.inverse() * v_frame_at_q;   // (d exp)^{-1} v
    Mat2 t = model.parallel_transport(*seg);            // center -> q
    Vec2 ptv = t.transposed() * v_frame_at_q;           // q -> center

    FrameCurvature rc = curvature_in_frame(model, center);
    Vec2 xbar = ec.inverse() * seg->log_vector;
    Vec2 predicted = vec_v + rc.apply(xbar, vec_v, xbar) * (1.0 / 6.0);
    return (ptv - predicted).norm();
}

Vec2 geodesic_variation(const ManifoldModel& model, const GeodesicSegment& seg,
                        const Vec2& psi0, const Vec2& psi1, double s) {
    if (s == 0.0) return psi0;
    Frame fs = model.frame_at(seg.start);
    Frame fe = model.frame_at(seg.end);
    Mat2 t = model.parallel_transport(seg);  // start -> end, frame components
    // Pbar psi1: end -> start, back to chart components at start.
    Vec2 pbar1 = fs.vectors * (t.transposed() * (fe.vectors.inverse() * psi1));
    if (s == 1.0) return pbar1;

    CurvatureData cd = model.curvature_at(seg.start);
    Vec2 sdot = seg.log_vector;
    double c1 = (s * s * s - s) / 6.0;
    double c2 = (s * s * s - 3.0 * s * s + 2.0 * s) / 6.0;
    return pbar1 * s + psi0 * (1.0 - s) + cd.apply_riemann(sdot, pbar1, sdot) * c1 -
           cd.apply_riemann(sdot, psi0, sdot) * c2;
}

}  // namespace mqheat
