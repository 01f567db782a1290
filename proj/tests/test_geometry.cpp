#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mqheat/expr.hpp"
#include "mqheat/geometry.hpp"
#include "mqheat/model_config.hpp"

using namespace mqheat;

namespace {
constexpr double kPi = 3.14159265358979323846;

ChartPoint random_sphere_point(const RoundSphere& sph, std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 v{n(rng), n(rng), n(rng)};
    return sph.from_embedding(v.normalized() * sph.radius());
}

double curvature_symmetry_defect(const ManifoldModel& model, const ChartPoint& p) {
    CurvatureData cd = model.curvature_at(p);
    Mat2 g = model.metric(p);
    // lowered tensor R_{mn p e} = R_{mn p}^{d} g_{de}
    double rl[2][2][2][2];
    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n)
            for (int q = 0; q < 2; ++q)
                for (int e = 0; e < 2; ++e) {
                    double v = 0.0;
                    for (int d = 0; d < 2; ++d)
                        v += cd.riemann[m][n][q][d] * g(d, e);
                    rl[m][n][q][e] = v;
                }
    double worst = 0.0;
    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n) {
            for (int q = 0; q < 2; ++q) {
                for (int e = 0; e < 2; ++e) {
                    worst = std::max(worst, std::abs(rl[m][n][q][e] - rl[q][e][m][n]));
                    worst = std::max(worst, std::abs(rl[m][n][q][e] + rl[n][m][q][e]));
                }
                // first Bianchi identity on the mixed tensor
                for (int d = 0; d < 2; ++d)
                    worst = std::max(
                        worst, std::abs(cd.riemann[m][n][q][d] +
                                        cd.riemann[q][m][n][d] +
                                        cd.riemann[n][q][m][d]));
            }
            worst = std::max(worst, std::abs(cd.ricci(m, n) - cd.ricci(n, m)));
            for (int q = 0; q < 2; ++q)
                worst = std::max(
                    worst, std::abs(cd.gamma[q][m][n] - cd.gamma[q][n][m]));
        }
    return worst;
}

// Finite-difference Jacobi field along the geodesic of `seg`, transported
// back to seg.start: the oracle for the endpoint-variation formula.
Vec2 jacobi_field_fd(const ManifoldModel& model, const GeodesicSegment& seg,
                     const Vec2& psi0, const Vec2& psi1, double s, double eps) {
    auto curve_at = [&](double sg) {
        ChartPoint a = model.exp_map(seg.start, psi0 * (sg * eps));
        ChartPoint b = model.exp_map(seg.end, psi1 * (sg * eps));
        auto sab = model.log_map(a, b);
        REQUIRE(sab.has_value());
        return model.exp_map(a, sab->log_vector * s);
    };
    ChartPoint plus = curve_at(1.0), minus = curve_at(-1.0);
    ChartPoint mid = model.exp_map(seg.start, seg.log_vector * s);
    REQUIRE(plus.chart_id == mid.chart_id);
    REQUIRE(minus.chart_id == mid.chart_id);
    Vec2 j_chart = model.chart_difference(minus, plus) * (1.0 / (2.0 * eps));
    // transport back to the start along the base geodesic
    auto back = model.log_map(seg.start, mid);
    REQUIRE(back.has_value());
    Mat2 t = model.parallel_transport(*back);  // start -> mid
    Frame fs = model.frame_at(seg.start), fm = model.frame_at(mid);
    Vec2 j_frame_mid = fm.vectors.inverse() * j_chart;
    return fs.vectors * (t.transposed() * j_frame_mid);
}

std::shared_ptr<ChartMetric> sheared_flat_chart() {
    // Flat torus metric written in a sheared chart: constant non-diagonal.
    ChartMetric::Params p;
    p.g11 = [](double, double) { return 1.0; };
    p.g12 = [](double, double) { return 0.3; };
    p.g22 = [](double, double) { return 1.09; };
    p.u_min = 0.0;
    p.u_max = 1.0;
    p.v_min = 0.0;
    p.v_max = 1.0;
    p.periodic = true;
    p.injectivity_radius = 0.4;
    return std::make_shared<ChartMetric>(p);
}

std::shared_ptr<ChartMetric> stereographic_patch() {
    // Unit-sphere metric in a stereographic chart, as expression strings.
    ChartMetric::Params p;
    auto lam2 = Expr::parse("1/(1+(x^2+y^2)/4)^2");
    p.g11 = lam2.as_function();
    p.g12 = [](double, double) { return 0.0; };
    p.g22 = lam2.as_function();
    p.u_min = -1.2;
    p.u_max = 1.2;
    p.v_min = -1.2;
    p.v_max = 1.2;
    p.injectivity_radius = 0.8;  // conservative within the patch
    return std::make_shared<ChartMetric>(p);
}

}  // namespace

TEST_CASE("flat torus: trivial curvature, wrap-around exp/log, transport") {
    FlatTorus torus(1.0, 2.0);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        ChartPoint p{0, {u(rng), 2.0 * u(rng)}};
        CHECK(curvature_symmetry_defect(torus, p) == 0.0);
        CHECK(torus.gauss_curvature(p) == 0.0);
        Vec2 v{0.3 * u(rng), 0.3 * u(rng)};
        ChartPoint q = torus.exp_map(p, v);
        auto seg = torus.log_map(p, q);
        REQUIRE(seg.has_value());
        CHECK((seg->log_vector - v).norm() < 1e-12);
        CHECK(torus.parallel_transport(*seg).max_abs() == 1.0);
    }
    // min-image wins over the direct difference
    auto seg = torus.log_map({0, {0.05, 0.0}}, {0, {0.95, 0.0}});
    REQUIRE(seg.has_value());
    CHECK(seg->log_vector.x == doctest::Approx(-0.1));
    CHECK(!torus.log_map({0, {0.0, 0.0}}, {0, {0.5, 0.0}}).has_value());
    CHECK_THROWS(torus.exp_map({0, {0.0, 0.0}}, Vec2{0.6, 0.0}));
}

TEST_CASE("sphere: analytic curvature has paper-convention signs") {
    RoundSphere sph(1.0);
    RoundSphere big(2.0);
    std::mt19937 rng(5);
    for (int rep = 0; rep < 12; ++rep) {
        ChartPoint p = random_sphere_point(sph, rng);
        CHECK(curvature_symmetry_defect(sph, p) < 1e-12);
        CHECK(sph.gauss_curvature(p) == doctest::Approx(1.0).epsilon(1e-12));
        // Ric_{st} = R_{s mu t}^{mu} = -K g_{st} with these conventions
        CurvatureData cd = sph.curvature_at(p);
        Mat2 g = sph.metric(p);
        CHECK((cd.ricci + g).max_abs() < 1e-12);

        ChartPoint pb = random_sphere_point(big, rng);
        CHECK(big.gauss_curvature(pb) == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("sphere: exp/log round trip and injectivity cutoff") {
    RoundSphere sph(1.0);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 30; ++rep) {
        ChartPoint p = random_sphere_point(sph, rng);
        Vec2 vf{u(rng), u(rng)};
        Frame f = sph.frame_at(p);
        Vec2 v = f.vectors * (vf * (2.5 / std::max(1.0, vf.norm())));
        ChartPoint q = sph.exp_map(p, v);
        auto seg = sph.log_map(p, q);
        REQUIRE(seg.has_value());
        ChartPoint back = sph.exp_map(p, seg->log_vector);
        CHECK((sph.embed(back) - sph.embed(q)).norm() < 1e-10);
        CHECK(seg->length ==
              doctest::Approx(sph.norm(p, v)).epsilon(1e-10));
    }
    // north pole, |v| = pi/2 -> equator
    ChartPoint np{0, {0.0, 0.0}};
    ChartPoint eq = sph.exp_map(np, {kPi / 2.0, 0.0});
    CHECK(sph.embed(eq).z == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sph.embed(eq).x == doctest::Approx(1.0).epsilon(1e-12));
    // near-antipodal accepted, antipodal rejected
    ChartPoint near_anti = sph.exp_map(np, {0.99 * kPi, 0.0});
    CHECK(sph.log_map(np, near_anti).has_value());
    ChartPoint anti = sph.from_embedding({0.0, 0.0, -1.0});
    CHECK(!sph.log_map(np, anti).has_value());
    // exp(0) = p
    ChartPoint same = sph.exp_map(near_anti, {0.0, 0.0});
    CHECK((sph.embed(same) - sph.embed(near_anti)).norm() == 0.0);
}

TEST_CASE("sphere: transport orthogonality, self-parallelism, holonomy") {
    RoundSphere sph(1.0);
    std::mt19937 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        ChartPoint p = random_sphere_point(sph, rng);
        ChartPoint q = random_sphere_point(sph, rng);
        auto seg = sph.log_map(p, q);
        if (!seg) continue;
        Mat2 t = sph.parallel_transport(*seg);
        CHECK((t * t.transposed() - Mat2::identity()).max_abs() < 1e-10);
        CHECK(t.det() == doctest::Approx(1.0).epsilon(1e-10));
        // geodesic tangent is self-parallel
        Frame fp = sph.frame_at(p), fq = sph.frame_at(q);
        Vec2 tan_start = fp.vectors.inverse() * seg->log_vector;
        auto seg_back = sph.log_map(q, p);
        REQUIRE(seg_back.has_value());
        Vec2 tan_end = (fq.vectors.inverse() * seg_back->log_vector) * -1.0;
        CHECK((t * tan_start - tan_end).norm() < 1e-10);
    }
    // holonomy around a geodesic triangle equals its area
    ChartPoint a = sph.from_embedding({1.0, 0.0, 0.0});
    ChartPoint b = sph.from_embedding({0.0, 1.0, 0.0});
    ChartPoint c = sph.from_embedding({0.0, 0.0, 1.0});
    Mat2 loop = sph.parallel_transport(*sph.log_map(c, a)) *
                sph.parallel_transport(*sph.log_map(b, c)) *
                sph.parallel_transport(*sph.log_map(a, b));
    double angle = std::atan2(loop.a10, loop.a00);
    CHECK(std::abs(angle) == doctest::Approx(kPi / 2.0).epsilon(1e-6));
    CHECK((loop * loop.transposed() - Mat2::identity()).max_abs() < 1e-10);
}

TEST_CASE("frames are orthonormal and positively oriented") {
    RoundSphere sph(1.3);
    std::mt19937 rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        ChartPoint p = random_sphere_point(sph, rng);
        Frame f = sph.frame_at(p);
        Mat2 g = sph.metric(p);
        Mat2 gram = f.vectors.transposed() * g * f.vectors;
        CHECK((gram - Mat2::identity()).max_abs() < 1e-12);
        CHECK(f.vectors.det() > 0.0);
    }
}

TEST_CASE("chart metric: sheared flat chart matches the torus") {
    auto cm = sheared_flat_chart();
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.2, 0.8);
    for (int rep = 0; rep < 5; ++rep) {
        ChartPoint p{0, {u(rng), u(rng)}};
        CHECK(curvature_symmetry_defect(*cm, p) < 1e-8);
        CHECK(std::abs(cm->gauss_curvature(p)) < 1e-8);
        CurvatureData cd = cm->curvature_at(p);
        for (int c2 = 0; c2 < 2; ++c2)
            for (int a2 = 0; a2 < 2; ++a2)
                for (int b2 = 0; b2 < 2; ++b2)
                    CHECK(std::abs(cd.gamma[c2][a2][b2]) < 1e-8);
        // straight lines are geodesics in a constant metric
        Vec2 v{0.15, -0.1};
        ChartPoint q = cm->exp_map(p, v);
        CHECK((q.coords - (p.coords + v)).norm() < 1e-10);
        auto seg = cm->log_map(p, q);
        REQUIRE(seg.has_value());
        CHECK((seg->log_vector - v).norm() < 1e-9);
        Mat2 t = cm->parallel_transport(*seg);
        CHECK((t - Mat2::identity()).max_abs() < 1e-10);
    }
}

TEST_CASE("chart metric: stereographic patch reproduces sphere curvature") {
    auto cm = stereographic_patch();
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int rep = 0; rep < 4; ++rep) {
        ChartPoint p{0, {u(rng), u(rng)}};
        CHECK(cm->gauss_curvature(p) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(curvature_symmetry_defect(*cm, p) < 1e-8);
        Mat2 g = cm->metric(p);
        CurvatureData cd = cm->curvature_at(p);
        CHECK((cd.ricci + g).max_abs() < 1e-7);
    }
    // exp/log round trip through the integrator + Newton inverse
    ChartPoint p{0, {0.1, -0.2}};
    for (Vec2 v : {Vec2{0.3, 0.1}, Vec2{-0.2, 0.25}, Vec2{0.05, -0.3}}) {
        ChartPoint q = cm->exp_map(p, v);
        auto seg = cm->log_map(p, q);
        REQUIRE(seg.has_value());
        CHECK((seg->log_vector - v).norm() < 1e-9);
        Mat2 t = cm->parallel_transport(*seg);
        CHECK((t * t.transposed() - Mat2::identity()).max_abs() < 1e-8);
    }
    // against the analytic sphere: same chart, same formulas
    RoundSphere sph(1.0);
    ChartPoint q = cm->exp_map(p, {0.3, 0.1});
    ChartPoint q_ref = sph.exp_map({0, p.coords}, {0.3, 0.1});
    CHECK(q.chart_id == 0);
    CHECK((q.coords - q_ref.coords).norm() < 1e-8);
}

TEST_CASE("parallel transport expansion is third order in distance") {
    RoundSphere sph(1.0);
    ChartPoint center{0, {0.15, 0.1}};
    Frame f = sph.frame_at(center);
    Vec2 dir_frame{std::cos(0.7), std::sin(0.7)};
    Vec2 v_frame{-0.3, 0.9};

    // flat case: identically zero
    FlatTorus torus(1.0, 1.0);
    ChartPoint tq = torus.exp_map({0, {0.4, 0.4}}, {0.1, 0.05});
    CHECK(pt_expansion_check(torus, {0, {0.4, 0.4}}, tq, v_frame) < 1e-9);

    std::vector<double> ds = {0.2, 0.1, 0.05};
    std::vector<double> errs;
    for (double d : ds) {
        ChartPoint q = sph.exp_map(center, f.vectors * (dir_frame * d));
        errs.push_back(pt_expansion_check(sph, center, q, v_frame));
    }
    // At least O(d^3): >= ~8 per halving. (On the round sphere the remainder
    // is in fact O(d^4); only the lower bound is asserted.)
    for (size_t i = 0; i + 1 < errs.size(); ++i)
        CHECK(errs[i] / errs[i + 1] > 5.5);
    // radial v: the curvature correction vanishes, remainder still tiny
    ChartPoint q = sph.exp_map(center, f.vectors * (dir_frame * 0.1));
    double radial_err = pt_expansion_check(sph, center, q, dir_frame);
    CHECK(radial_err < 5e-4 * 0.1);
}

TEST_CASE("geodesic variation formula: endpoints, flat case, Jacobi oracle") {
    FlatTorus torus(1.0, 1.0);
    ChartPoint p{0, {0.3, 0.3}};
    ChartPoint q = torus.exp_map(p, {0.2, 0.1});
    auto seg = torus.log_map(p, q);
    REQUIRE(seg.has_value());
    Vec2 psi0{0.5, -0.2}, psi1{-0.1, 0.4};
    CHECK((geodesic_variation(torus, *seg, psi0, psi1, 0.0) - psi0).norm() == 0.0);
    CHECK((geodesic_variation(torus, *seg, psi0, psi1, 1.0) - psi1).norm() <
          1e-14);
    for (double s : {0.25, 0.5, 0.75}) {
        Vec2 lin = psi1 * s + psi0 * (1.0 - s);
        CHECK((geodesic_variation(torus, *seg, psi0, psi1, s) - lin).norm() <
              1e-14);
    }

    RoundSphere sph(1.0);
    ChartPoint c{0, {0.2, -0.1}};
    Frame fc = sph.frame_at(c);
    Vec2 dir{std::cos(0.4), std::sin(0.4)};
    std::vector<double> ds = {0.2, 0.1, 0.05, 0.025};
    std::vector<double> errs;
    for (double d : ds) {
        ChartPoint e = sph.exp_map(c, fc.vectors * (dir * d));
        auto sg = sph.log_map(c, e);
        REQUIRE(sg.has_value());
        Frame fe = sph.frame_at(e);
        Vec2 w0 = fc.vectors * Vec2{0.7, 0.4};
        Vec2 w1 = fe.vectors * Vec2{-0.3, 0.6};
        double worst = 0.0;
        for (double s : {0.3, 0.5, 0.8}) {
            Vec2 oracle = jacobi_field_fd(sph, *sg, w0, w1, s, 1e-5);
            Vec2 formula = geodesic_variation(sph, *sg, w0, w1, s);
            worst = std::max(worst, (formula - oracle).norm());
        }
        errs.push_back(worst);
    }
    double slope = std::log(errs.front() / errs.back()) /
                   std::log(ds.front() / ds.back());
    CHECK(slope > 2.7);
}

TEST_CASE("model config: build from JSON") {
    auto torus = model_from_json_text(R"({"kind":"torus","L1":2.0,"L2":1.0})");
    CHECK(torus->kind() == ModelKind::FlatTorus);
    CHECK(torus->injectivity_radius() == doctest::Approx(0.5));
    auto sph = model_from_json_text(R"({"kind":"sphere","radius":2.0})");
    CHECK(sph->kind() == ModelKind::RoundSphere);
    auto cm = model_from_json_text(R"({
        "kind": "chart",
        "g11": "1/(1+(x^2+y^2)/4)^2", "g12": "0",
        "g22": "1/(1+(x^2+y^2)/4)^2",
        "u_min": -1, "u_max": 1, "v_min": -1, "v_max": 1,
        "injectivity_radius": 0.5})");
    CHECK(cm->gauss_curvature({0, {0.2, 0.1}}) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS(model_from_json_text(R"({"kind":"nope"})"));
}
