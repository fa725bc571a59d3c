#pragma once

#include <cmath>

namespace latticemc {

/// 2-vector in the xz plane (the simulation restricts motion to y = 0).
struct Vec2 {
    double x = 0.0;
    double z = 0.0;

    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; z += o.z; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; z -= o.z; return *this; }
    constexpr Vec2& operator*=(double a) { x *= a; z *= a; return *this; }
};

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator*(double a, Vec2 v) { return v *= a; }
constexpr Vec2 operator*(Vec2 v, double a) { return v *= a; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.z * b.z; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.z); }

}  // namespace latticemc
