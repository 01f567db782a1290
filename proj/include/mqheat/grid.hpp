#pragma once
// Quadrature grids discretizing the manifold: points, Riemannian volume
// weights and a fixed orthonormal frame per point, plus cached embedding
// data for fast pairwise geometry.

#include <cstdint>
#include <memory>
#include <vector>

#include "mqheat/geometry.hpp"

namespace mqheat {

struct QuadratureGrid {
    std::shared_ptr<const ManifoldModel> model;
    std::vector<ChartPoint> points;
    std::vector<double> weights;
    std::vector<Frame> frames;
    std::vector<Mat2> frame_inv;
    std::vector<double> gauss_k;  // Gauss curvature at each point

    // Sphere caches: embedded points and embedded frame vectors.
    std::vector<Vec3> embedded;
    std::vector<Vec3> frame_e1, frame_e2;

    int n0 = 0, n1 = 0;  // grid layout (theta/phi bands, or torus axes)

    int size() const { return static_cast<int>(points.size()); }
    double total_volume() const;
    // Largest nearest-neighbor spacing, used for resolution warnings.
    double max_spacing() const;
    std::uint64_t hash() const;
};

// resolution >= 8. Torus: resolution x resolution uniform cells. Sphere:
// Gauss-Legendre nodes in cos(theta) x uniform longitudes (resolution each),
// so the weights sum to the exact area. ChartMetric: uniform cell centers
// over the declared rectangle with sqrt(det g) weights.
std::shared_ptr<QuadratureGrid> build_grid(
    std::shared_ptr<const ManifoldModel> model, int resolution);

// Geometry of an ordered point pair (i <- j): distance, normal coordinates
// of j in the frame at i, and parallel transport of frame components from j
// to i along the minimal geodesic.
struct PairGeometry {
    double dist = 0.0;
    Vec2 ybar;       // frame components at i
    Mat2 transport;  // frame components at j -> frame components at i
};

// False when the pair is at or beyond the injectivity radius.
bool grid_pair_geometry(const QuadratureGrid& grid, int i, int j,
                        PairGeometry* out);

// Distance only (cheaper for neighbor scans).
double grid_pair_distance(const QuadratureGrid& grid, int i, int j);

// Gauss-Legendre nodes/weights on (-1, 1).
void gauss_legendre(int n, std::vector<double>* nodes,
                    std::vector<double>* weights);

}  // namespace mqheat
