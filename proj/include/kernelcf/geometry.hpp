#ifndef KERNELCF_GEOMETRY_HPP
#define KERNELCF_GEOMETRY_HPP

#include <cmath>

namespace kernelcf {

// 2-D point in layout space; axes are named (t, u) throughout.
struct Vec2 {
    double t = 0.0;
    double u = 0.0;

    Vec2 operator+(const Vec2& o) const { return {t + o.t, u + o.u}; }
    Vec2 operator-(const Vec2& o) const { return {t - o.t, u - o.u}; }
    Vec2 operator*(double s) const { return {t * s, u * s}; }
    Vec2& operator+=(const Vec2& o) {
        t += o.t;
        u += o.u;
        return *this;
    }
    double norm() const { return std::hypot(t, u); }
};

// Axis-aligned box, used as the integration region A.
struct Box2 {
    double t_min = 0.0;
    double t_max = 0.0;
    double u_min = 0.0;
    double u_max = 0.0;

    double width() const { return t_max - t_min; }
    double height() const { return u_max - u_min; }
    double area() const { return width() * height(); }
    bool contains(const Vec2& p) const {
        return p.t >= t_min && p.t <= t_max && p.u >= u_min && p.u <= u_max;
    }
};

// Symmetric 2x2 matrix (covariances, bandwidth matrices).
struct SymMat2 {
    double tt = 0.0;
    double tu = 0.0;
    double uu = 0.0;

    double trace() const { return tt + uu; }
    double det() const { return tt * uu - tu * tu; }
    double min_eigenvalue() const {
        const double mid = 0.5 * (tt + uu);
        const double rad = std::sqrt(0.25 * (tt - uu) * (tt - uu) + tu * tu);
        return mid - rad;
    }
    bool positive_definite() const { return tt > 0.0 && det() > 0.0; }
    SymMat2 scaled(double s) const { return {tt * s, tu * s, uu * s}; }
};

}  // namespace kernelcf

#endif
