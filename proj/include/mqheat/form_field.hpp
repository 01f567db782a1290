#pragma once
// Discrete differential form: one exterior-algebra element per grid point,
// stored as four coefficient planes on the orthonormal frame basis
// {1, e1, e2, e1^e2} of each point.

#include <array>
#include <memory>
#include <vector>

#include "mqheat/grid.hpp"

namespace mqheat {

struct FormField {
    std::shared_ptr<const QuadratureGrid> grid;
    std::array<std::vector<double>, 4> comp;

    FormField() = default;
    explicit FormField(std::shared_ptr<const QuadratureGrid> g) : grid(std::move(g)) {
        for (auto& c : comp) c.assign(grid->size(), 0.0);
    }

    int size() const { return grid ? grid->size() : 0; }

    double sup_norm() const {
        double m = 0.0;
        for (int i = 0; i < size(); ++i) {
            double v = 0.0;
            for (int d = 0; d < 4; ++d) v += comp[d][i] * comp[d][i];
            m = std::max(m, v);
        }
        return std::sqrt(m);
    }

    double max_abs_component(int d) const {
        double m = 0.0;
        for (double v : comp[d]) m = std::max(m, std::abs(v));
        return m;
    }

    FormField& operator+=(const FormField& o) {
        for (int d = 0; d < 4; ++d)
            for (int i = 0; i < size(); ++i) comp[d][i] += o.comp[d][i];
        return *this;
    }
    FormField operator-(const FormField& o) const {
        FormField r = *this;
        for (int d = 0; d < 4; ++d)
            for (int i = 0; i < r.size(); ++i) r.comp[d][i] -= o.comp[d][i];
        return r;
    }
    FormField operator+(const FormField& o) const {
        FormField r = *this;
        r += o;
        return r;
    }
    FormField operator*(double c) const {
        FormField r = *this;
        for (auto& plane : r.comp)
            for (double& v : plane) v *= c;
        return r;
    }
};

inline double sup_distance(const FormField& a, const FormField& b) {
    return (a - b).sup_norm();
}

}  // namespace mqheat
