#pragma once
// Small fixed-size linear algebra used throughout. Everything is value
// semantics; no external dependency.

#include <array>
#include <cmath>
#include <cstddef>

namespace mqheat {

struct Vec2 {
    double x = 0.0, y = 0.0;

    double& operator[](int i) { return i == 0 ? x : y; }
    double operator[](int i) const { return i == 0 ? x : y; }

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double c) const { return {x * c, y * c}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};
inline Vec2 operator*(double c, const Vec2& v) { return v * c; }

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double c) const { return {x * c, y * c, z * c}; }
    Vec3 operator-() const { return {-x, -y, -z}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
    Vec3 normalized() const { double n = norm(); return {x / n, y / n, z / n}; }
};
inline Vec3 operator*(double c, const Vec3& v) { return v * c; }

// 2x2 matrix, row major: a[row][col].
struct Mat2 {
    double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }
    static Mat2 rotation(double theta) {
        double c = std::cos(theta), s = std::sin(theta);
        return {c, -s, s, c};
    }

    double operator()(int r, int c) const {
        return r == 0 ? (c == 0 ? a00 : a01) : (c == 0 ? a10 : a11);
    }
    double& operator()(int r, int c) {
        return r == 0 ? (c == 0 ? a00 : a01) : (c == 0 ? a10 : a11);
    }

    Mat2 operator+(const Mat2& o) const {
        return {a00 + o.a00, a01 + o.a01, a10 + o.a10, a11 + o.a11};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a00 - o.a00, a01 - o.a01, a10 - o.a10, a11 - o.a11};
    }
    Mat2 operator*(double c) const { return {a00 * c, a01 * c, a10 * c, a11 * c}; }
    Mat2 operator*(const Mat2& o) const {
        return {a00 * o.a00 + a01 * o.a10, a00 * o.a01 + a01 * o.a11,
                a10 * o.a00 + a11 * o.a10, a10 * o.a01 + a11 * o.a11};
    }
    Vec2 operator*(const Vec2& v) const {
        return {a00 * v.x + a01 * v.y, a10 * v.x + a11 * v.y};
    }

    Mat2 transposed() const { return {a00, a10, a01, a11}; }
    double det() const { return a00 * a11 - a01 * a10; }
    double trace() const { return a00 + a11; }
    // adj(M) * M = det(M) * I
    Mat2 adjugate() const { return {a11, -a01, -a10, a00}; }
    Mat2 inverse() const {
        double d = det();
        return {a11 / d, -a01 / d, -a10 / d, a00 / d};
    }
    double max_abs() const {
        return std::max(std::max(std::abs(a00), std::abs(a01)),
                        std::max(std::abs(a10), std::abs(a11)));
    }
    // Largest singular value (closed form for 2x2).
    double sigma_max() const {
        double e = (a00 + a11) * 0.5, f = (a00 - a11) * 0.5;
        double g = (a10 + a01) * 0.5, h = (a10 - a01) * 0.5;
        return std::sqrt(e * e + h * h) + std::sqrt(f * f + g * g);
    }
};
inline Mat2 operator*(double c, const Mat2& m) { return m * c; }

// Outer product u v^T.
inline Mat2 outer(const Vec2& u, const Vec2& v) {
    return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y};
}

// Rotation in 3-space about unit axis n by angle theta (Rodrigues).
inline Vec3 rotate_about(const Vec3& n, double theta, const Vec3& v) {
    double c = std::cos(theta), s = std::sin(theta);
    return v * c + n.cross(v) * s + n * (n.dot(v) * (1.0 - c));
}

}  // namespace mqheat
