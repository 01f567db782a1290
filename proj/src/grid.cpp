#include "mqheat/grid.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace mqheat {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double QuadratureGrid::total_volume() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

double QuadratureGrid::max_spacing() const {
    // Structured grids: neighbor spacing along the two axes.
    double m = 0.0;
    for (int b = 0; b < n0; ++b) {
        int row = b * n1;
        if (n1 > 1) m = std::max(m, grid_pair_distance(*this, row, row + 1));
        if (b + 1 < n0) m = std::max(m, grid_pair_distance(*this, row, row + n1));
    }
    return m;
}

std::uint64_t QuadratureGrid::hash() const {
    // FNV-1a over point coordinates and weights.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int k = 0; k < 8; ++k) {
            h ^= (bits >> (8 * k)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    for (int i = 0; i < size(); ++i) {
        mix(points[i].coords.x);
        mix(points[i].coords.y);
        mix(weights[i]);
    }
    return h;
}

void gauss_legendre(int n, std::vector<double>* nodes, std::vector<double>* weights) {
    nodes->resize(n);
    weights->resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton from the Chebyshev estimate.
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int l = 2; l <= n; ++l) {
                double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        (*nodes)[i] = -x;
        (*nodes)[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        (*weights)[i] = w;
        (*weights)[n - 1 - i] = w;
    }
}

namespace {

void fill_point_caches(QuadratureGrid& g) {
    int n = g.size();
    g.frames.resize(n);
    g.frame_inv.resize(n);
    g.gauss_k.resize(n);
    for (int i = 0; i < n; ++i) {
        g.frames[i] = g.model->frame_at(g.points[i]);
        g.frame_inv[i] = g.frames[i].vectors.inverse();
        g.gauss_k[i] = g.model->gauss_curvature(g.points[i]);
    }
    if (g.model->kind() == ModelKind::RoundSphere) {
        auto* sph = static_cast<const RoundSphere*>(g.model.get());
        g.embedded.resize(n);
        g.frame_e1.resize(n);
        g.frame_e2.resize(n);
        for (int i = 0; i < n; ++i) {
            const ChartPoint& p = g.points[i];
            g.embedded[i] = sph->embed(p);
            const Mat2& e = g.frames[i].vectors;
            g.frame_e1[i] = sph->push_tangent(p, {e.a00, e.a10});
            g.frame_e2[i] = sph->push_tangent(p, {e.a01, e.a11});
        }
    }
}

}  // namespace

std::shared_ptr<QuadratureGrid> build_grid(
    std::shared_ptr<const ManifoldModel> model, int resolution) {
    if (resolution < 8)
        throw std::invalid_argument("build_grid: resolution must be >= 8");
    auto grid = std::make_shared<QuadratureGrid>();
    grid->model = model;

    switch (model->kind()) {
        case ModelKind::FlatTorus: {
            auto* torus = static_cast<const FlatTorus*>(model.get());
            int n = resolution;
            grid->n0 = n;
            grid->n1 = n;
            double l1 = torus->side(0), l2 = torus->side(1);
            double w = l1 * l2 / double(n) / double(n);
            grid->points.reserve(std::size_t(n) * n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    grid->points.push_back({0, {l1 * i / n, l2 * j / n}});
                    grid->weights.push_back(w);
                }
            break;
        }
        case ModelKind::RoundSphere: {
            auto* sph = static_cast<const RoundSphere*>(model.get());
            int nt = resolution, np = resolution;
            grid->n0 = nt;
            grid->n1 = np;
            std::vector<double> xs, ws;
            gauss_legendre(nt, &xs, &ws);
            double a = sph->radius();
            for (int i = 0; i < nt; ++i) {
                double ct = xs[nt - 1 - i];  // from north (+1) to south (-1)
                double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
                double w = a * a * ws[nt - 1 - i] * (2.0 * kPi / np);
                for (int j = 0; j < np; ++j) {
                    double phi = 2.0 * kPi * j / np;
                    Vec3 x{a * st * std::cos(phi), a * st * std::sin(phi), a * ct};
                    grid->points.push_back(sph->from_embedding(x));
                    grid->weights.push_back(w);
                }
            }
            break;
        }
        case ModelKind::ChartMetric: {
            auto* cm = static_cast<const ChartMetric*>(model.get());
            const auto& pr = cm->params();
            int n = resolution;
            grid->n0 = n;
            grid->n1 = n;
            double du = (pr.u_max - pr.u_min) / n;
            double dv = (pr.v_max - pr.v_min) / n;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    ChartPoint p{0,
                                 {pr.u_min + (i + 0.5) * du, pr.v_min + (j + 0.5) * dv}};
                    grid->points.push_back(p);
                    grid->weights.push_back(cm->sqrt_det_metric(p) * du * dv);
                }
            break;
        }
    }
    fill_point_caches(*grid);
    return grid;
}

double grid_pair_distance(const QuadratureGrid& grid, int i, int j) {
    switch (grid.model->kind()) {
        case ModelKind::FlatTorus: {
            auto* torus = static_cast<const FlatTorus*>(grid.model.get());
            return torus->min_image(grid.points[i], grid.points[j]).norm();
        }
        case ModelKind::RoundSphere: {
            auto* sph = static_cast<const RoundSphere*>(grid.model.get());
            const Vec3& x = grid.embedded[i];
            const Vec3& y = grid.embedded[j];
            return sph->radius() * std::atan2(x.cross(y).norm(), x.dot(y));
        }
        default:
            return grid.model->geodesic_distance(grid.points[i], grid.points[j]);
    }
}

bool grid_pair_geometry(const QuadratureGrid& grid, int i, int j,
                        PairGeometry* out) {
    const ManifoldModel& model = *grid.model;
    switch (model.kind()) {
        case ModelKind::FlatTorus: {
            auto* torus = static_cast<const FlatTorus*>(grid.model.get());
            Vec2 d = torus->min_image(grid.points[i], grid.points[j]);
            double len = d.norm();
            if (len >= model.injectivity_radius()) return false;
            out->dist = len;
            out->ybar = d;  // flat frame is the identity
            out->transport = Mat2::identity();
            return true;
        }
        case ModelKind::RoundSphere: {
            auto* sph = static_cast<const RoundSphere*>(grid.model.get());
            double a = sph->radius();
            const Vec3& x = grid.embedded[i];
            const Vec3& y = grid.embedded[j];
            Vec3 cr = x.cross(y);
            double sn = cr.norm();
            double theta = std::atan2(sn, x.dot(y));
            double dist = a * theta;
            if (dist >= model.injectivity_radius() * (1.0 - 1e-12)) return false;
            out->dist = dist;
            if (theta < 1e-15) {
                out->ybar = {0.0, 0.0};
                out->transport = Mat2::identity();
                return true;
            }
            Vec3 tdir = (y - x * (x.dot(y) / (a * a))).normalized();
            out->ybar = {dist * tdir.dot(grid.frame_e1[i]),
                         dist * tdir.dot(grid.frame_e2[i])};
            Vec3 axis = cr * (1.0 / sn);
            // transport j -> i rotates by -theta about the same axis
            Vec3 t1 = rotate_about(axis, -theta, grid.frame_e1[j]);
            Vec3 t2 = rotate_about(axis, -theta, grid.frame_e2[j]);
            out->transport = Mat2{grid.frame_e1[i].dot(t1), grid.frame_e1[i].dot(t2),
                                  grid.frame_e2[i].dot(t1), grid.frame_e2[i].dot(t2)};
            return true;
        }
        default: {
            auto seg = model.log_map(grid.points[i], grid.points[j]);
            if (!seg) return false;
            out->dist = seg->length;
            out->ybar = grid.frame_inv[i] * seg->log_vector;
            auto seg_back = model.log_map(grid.points[j], grid.points[i]);
            if (!seg_back) return false;
            out->transport = model.parallel_transport(*seg_back);
            return true;
        }
    }
}

}  // namespace mqheat
