#pragma once
// Riemannian structure on 2D models: metric, Levi-Civita connection,
// curvature, geodesics, parallel transport and normal-coordinate maps.
//
// Conventions follow the classical coordinate formulas:
//   Gamma^c_{ab} = (1/2) g^{cd} (g_{ad,b} + g_{bd,a} - g_{ab,d})
//   R_{mu nu ga}^{de} = Gamma^de_{nu ga, mu} - Gamma^de_{mu ga, nu}
//                       + Gamma^de_{mu ch} Gamma^ch_{nu ga}
//                       - Gamma^de_{nu ch} Gamma^ch_{mu ga}
//   Ric_{st} = R_{s mu t}^{mu}
// With these signs the unit sphere has R_{1221} = +1 (Gauss curvature) and
// Ric = -g.

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "mqheat/linalg.hpp"

namespace mqheat {

enum class ModelKind { FlatTorus, RoundSphere, ChartMetric };

struct ChartPoint {
    int chart_id = 0;
    Vec2 coords;
};

// Orthonormal tangent basis at a point; columns of `vectors` are the basis
// vectors in chart coordinates (Gram-Schmidt on the coordinate frame, so the
// matrix is upper triangular with positive diagonal).
struct Frame {
    ChartPoint base;
    Mat2 vectors;
};

struct CurvatureData {
    // gamma[c][a][b] = Gamma^c_{ab}
    double gamma[2][2][2] = {};
    // riemann[mu][nu][ga][de] = R_{mu nu ga}^{de}
    double riemann[2][2][2][2] = {};
    Mat2 ricci;
    ChartPoint evaluated_at;

    // [R(u,v)w]^d in chart coordinates.
    Vec2 apply_riemann(const Vec2& u, const Vec2& v, const Vec2& w) const {
        Vec2 out;
        for (int d = 0; d < 2; ++d) {
            double s = 0.0;
            for (int mu = 0; mu < 2; ++mu)
                for (int nu = 0; nu < 2; ++nu)
                    for (int ga = 0; ga < 2; ++ga)
                        s += riemann[mu][nu][ga][d] * u[mu] * v[nu] * w[ga];
            out[d] = s;
        }
        return out;
    }
};

// Oriented short geodesic from `start` to `end`; log_vector holds the
// normal coordinates of `end` in the tangent space at `start` (chart
// components), so exp_start(log_vector) = end and |log_vector|_g = length.
struct GeodesicSegment {
    ChartPoint start;
    ChartPoint end;
    Vec2 log_vector;
    double length = 0.0;
};

class ManifoldModel {
public:
    virtual ~ManifoldModel() = default;

    virtual ModelKind kind() const = 0;
    int dim() const { return 2; }
    virtual double injectivity_radius() const = 0;
    virtual bool in_domain(const ChartPoint& p) const = 0;

    // Metric tensor in chart coordinates; throws if p is outside the chart
    // domain or the metric fails to be positive definite there.
    virtual Mat2 metric(const ChartPoint& p) const = 0;

    virtual CurvatureData curvature_at(const ChartPoint& p) const = 0;

    // Geodesic endpoint for tangent vector v (chart components at p).
    // Requires |v|_g < injectivity radius.
    virtual ChartPoint exp_map(const ChartPoint& p, const Vec2& v) const = 0;

    // Inverse of exp_map; empty when q lies at or beyond the injectivity
    // radius of `center` (the kernel is zero there).
    virtual std::optional<GeodesicSegment> log_map(const ChartPoint& center,
                                                   const ChartPoint& q) const = 0;

    // Orthogonal matrix mapping orthonormal-frame components at seg.start to
    // orthonormal-frame components at seg.end along the geodesic.
    virtual Mat2 parallel_transport(const GeodesicSegment& seg) const = 0;

    // Riemannian distance within the injectivity radius; +inf outside.
    virtual double geodesic_distance(const ChartPoint& p,
                                     const ChartPoint& q) const;

    // Wrap / re-chart a point into its canonical representation.
    virtual ChartPoint canonical(const ChartPoint& p) const { return p; }

    // Coordinate difference to - from within one chart, respecting periodic
    // identifications. Throws when the points live in different charts.
    virtual Vec2 chart_difference(const ChartPoint& from,
                                  const ChartPoint& to) const;

    Frame frame_at(const ChartPoint& p) const;
    double sqrt_det_metric(const ChartPoint& p) const;
    // Gauss curvature K = R_{1221} in an orthonormal frame.
    virtual double gauss_curvature(const ChartPoint& p) const;

    double norm(const ChartPoint& p, const Vec2& v) const {
        Mat2 g = metric(p);
        return std::sqrt(v.dot(g * v));
    }
};

class FlatTorus final : public ManifoldModel {
public:
    FlatTorus(double l1, double l2);
    ModelKind kind() const override { return ModelKind::FlatTorus; }
    double injectivity_radius() const override { return 0.5 * std::min(l1_, l2_); }
    bool in_domain(const ChartPoint&) const override { return true; }
    Mat2 metric(const ChartPoint&) const override { return Mat2::identity(); }
    CurvatureData curvature_at(const ChartPoint& p) const override;
    ChartPoint exp_map(const ChartPoint& p, const Vec2& v) const override;
    std::optional<GeodesicSegment> log_map(const ChartPoint& center,
                                           const ChartPoint& q) const override;
    Mat2 parallel_transport(const GeodesicSegment&) const override {
        return Mat2::identity();
    }
    ChartPoint canonical(const ChartPoint& p) const override;
    Vec2 chart_difference(const ChartPoint& from,
                          const ChartPoint& to) const override {
        return min_image(from, to);
    }
    double gauss_curvature(const ChartPoint&) const override { return 0.0; }

    double side(int i) const { return i == 0 ? l1_ : l2_; }
    // Shortest lattice representative of q - p.
    Vec2 min_image(const ChartPoint& p, const ChartPoint& q) const;

private:
    double l1_, l2_;
};

// Round sphere of radius a, two stereographic charts:
//   chart 0 (around the north pole):  u + iv = 2a (x + iy) / (a + z)
//   chart 1 (around the south pole):  u + iv = 2a (x - iy) / (a - z)
// The conjugation in chart 1 makes the transition w -> 4a^2 / w holomorphic,
// so both charts induce the same orientation. The metric in either chart is
// conformal, g = lambda^2 I with lambda = 1 / (1 + |w|^2 / 4a^2). Charts are
// limited to latitudes above/below -+pi/4; the canonical chart switches at
// the equator.
class RoundSphere final : public ManifoldModel {
public:
    explicit RoundSphere(double radius);
    ModelKind kind() const override { return ModelKind::RoundSphere; }
    double radius() const { return a_; }
    double injectivity_radius() const override { return kPi * a_; }
    bool in_domain(const ChartPoint& p) const override;
    Mat2 metric(const ChartPoint& p) const override;
    CurvatureData curvature_at(const ChartPoint& p) const override;
    ChartPoint exp_map(const ChartPoint& p, const Vec2& v) const override;
    std::optional<GeodesicSegment> log_map(const ChartPoint& center,
                                           const ChartPoint& q) const override;
    Mat2 parallel_transport(const GeodesicSegment& seg) const override;
    double geodesic_distance(const ChartPoint& p,
                             const ChartPoint& q) const override;
    ChartPoint canonical(const ChartPoint& p) const override;
    double gauss_curvature(const ChartPoint&) const override {
        return 1.0 / (a_ * a_);
    }

    Vec3 embed(const ChartPoint& p) const;
    ChartPoint from_embedding(const Vec3& x) const;
    // Pushforward of chart components at p to R^3.
    Vec3 push_tangent(const ChartPoint& p, const Vec2& v) const;
    // Pull a tangent 3-vector (assumed tangent to the sphere at p) back to
    // chart components.
    Vec2 pull_tangent(const ChartPoint& p, const Vec3& v) const;

    static constexpr double kPi = 3.14159265358979323846;

private:
    double conformal_lambda(const Vec2& w) const;
    double a_;
};

// User-supplied smooth chart metric on a rectangle; curvature via 4th-order
// finite differences, geodesics and transport via fixed-step RK4, log via
// Newton iteration on exp_map.
class ChartMetric final : public ManifoldModel {
public:
    using MetricFn = std::function<double(double, double)>;

    struct Params {
        MetricFn g11, g12, g22;
        double u_min = 0.0, u_max = 1.0, v_min = 0.0, v_max = 1.0;
        double injectivity_radius = 0.0;  // user-declared lower bound
        double chart_scale = 1.0;         // finite-difference step is 1e-4 * scale
        bool periodic = false;            // identify opposite edges (torus-like)
    };

    explicit ChartMetric(Params params);
    ModelKind kind() const override { return ModelKind::ChartMetric; }
    double injectivity_radius() const override { return params_.injectivity_radius; }
    bool in_domain(const ChartPoint& p) const override;
    Mat2 metric(const ChartPoint& p) const override;
    CurvatureData curvature_at(const ChartPoint& p) const override;
    ChartPoint exp_map(const ChartPoint& p, const Vec2& v) const override;
    std::optional<GeodesicSegment> log_map(const ChartPoint& center,
                                           const ChartPoint& q) const override;
    Mat2 parallel_transport(const GeodesicSegment& seg) const override;
    ChartPoint canonical(const ChartPoint& p) const override;
    Vec2 chart_difference(const ChartPoint& from,
                          const ChartPoint& to) const override {
        return chart_delta(from.coords, to.coords);
    }

    const Params& params() const { return params_; }
    double fd_step() const { return 1e-4 * params_.chart_scale; }

    static constexpr int kGeodesicSteps = 64;
    static constexpr int kNewtonMaxIter = 50;
    static constexpr double kNewtonTol = 1e-10;

private:
    Vec2 wrap(Vec2 c) const;
    Vec2 chart_delta(const Vec2& from, const Vec2& to) const;
    // d/ds (u, w) for the geodesic equation u'' = -Gamma(u)(w, w), extended
    // with two transported vectors.
    void ode_rhs(const double y[8], double dy[8]) const;
    void integrate(const Vec2& p, const Vec2& v, Vec2 carried[2], int n_carried,
                   Vec2* out_p, Vec2* out_v) const;

    Params params_;
};

// --- Normal-coordinate expansion checks -------------------------------------

// |Pbar v - (vec v + (1/6) R(x, vec v) x)| evaluated in the orthonormal frame
// at `center`; v is given in frame components at q. Scales as O(d^3)|v|.
double pt_expansion_check(const ManifoldModel& model, const ChartPoint& center,
                          const ChartPoint& q, const Vec2& v_frame_at_q);

// Tangent field along a geodesic determined by its endpoint values
// (chart components); returns Pbar psi_s transported back to seg.start:
//   s Pbar psi1 + (1-s) psi0 + ((s^3-s)/6) R(sdot, Pbar psi1) sdot
//   - ((s^3-3s^2+2s)/6) R(sdot, psi0) sdot,   curvature at seg.start.
Vec2 geodesic_variation(const ManifoldModel& model, const GeodesicSegment& seg,
                        const Vec2& psi0, const Vec2& psi1, double s);

// Curvature contractions in the orthonormal frame at p.
struct FrameCurvature {
    double riemann[2][2][2][2];  // R_{abc}^{d} in frame indices
    Mat2 ricci;                  // paper convention (unit sphere: -I)
    double gauss;                // K = R_{1221}

    Vec2 apply(const Vec2& u, const Vec2& v, const Vec2& w) const {
        Vec2 out;
        for (int d = 0; d < 2; ++d) {
            double s = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int c = 0; c < 2; ++c)
                        s += riemann[a][b][c][d] * u[a] * v[b] * w[c];
            out[d] = s;
        }
        return out;
    }
};
FrameCurvature curvature_in_frame(const ManifoldModel& model, const ChartPoint& p);

}  // namespace mqheat
