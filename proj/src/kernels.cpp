#include "kernelcf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kernelcf/errors.hpp"

namespace kernelcf {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2*pi)
constexpr double kTwoPi = 6.2831853071795864769;

// Recursive adaptive Simpson with an absolute error budget. The first
// `force` levels always subdivide, so integrands that vanish at panel
// midpoints cannot trick the error estimate into stopping early.
template <class F>
double adaptive_simpson_step(const F& f, double a, double b, double fa, double fm, double fb,
                             double whole, double tol, int depth, int force) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || (force <= 0 && std::abs(left + right - whole) <= 15.0 * tol)) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, force - 1) +
           adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, force - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol, 48, 6);
}

double support_bound(const KernelSpec& spec) {
    // Gaussian mass beyond 12 standard deviations is far below tolerance.
    return spec.compact_support() ? 1.0 : 12.0;
}

std::size_t nearest_point_1d(const Sample1D& sample, double x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double d = std::abs(sample.x[i] - x);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::size_t nearest_point_2d(const Sample2D& sample, const Vec2& q) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double d = (sample.points[i] - q).norm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

struct BinnedPoints {
    std::vector<Vec2> centers;  // per sample point, its cell center
    double cell_area = 0.0;
};

// Assigns each point to an equal-area grid cell; a zero-extent axis keeps
// the raw coordinate (all points share it, so its kernel factor cancels).
BinnedPoints bin_points(const Sample2D& sample, const GridSpec& grid) {
    BinnedPoints out;
    const int m = grid.cells_per_axis;
    const double wt = grid.box.width() / m;
    const double wu = grid.box.height() / m;
    out.cell_area = wt * wu;
    out.centers.reserve(sample.size());
    for (const Vec2& p : sample.points) {
        Vec2 c = p;
        if (wt > 0.0) {
            int k = static_cast<int>(std::floor((p.t - grid.box.t_min) / wt));
            k = std::clamp(k, 0, m - 1);
            c.t = grid.box.t_min + (k + 0.5) * wt;
        }
        if (wu > 0.0) {
            int k = static_cast<int>(std::floor((p.u - grid.box.u_min) / wu));
            k = std::clamp(k, 0, m - 1);
            c.u = grid.box.u_min + (k + 0.5) * wu;
        }
        out.centers.push_back(c);
    }
    return out;
}

}  // namespace

double kernel_eval(const KernelSpec& spec, double x) {
    switch (spec.family) {
        case KernelFamily::Epanechnikov:
            return std::abs(x) <= 1.0 ? 0.75 * (1.0 - x * x) : 0.0;
        case KernelFamily::Gaussian:
            return kInvSqrt2Pi * std::exp(-0.5 * x * x);
        case KernelFamily::Uniform:
            return std::abs(x) <= 1.0 ? 0.5 : 0.0;
    }
    return 0.0;
}

KernelConstants kernel_constants(const KernelSpec& spec) {
    const double bound = support_bound(spec);
    const double tol = 1e-11;
    KernelConstants out;
    out.roughness = adaptive_simpson(
        [&](double x) {
            const double k = kernel_eval(spec, x);
            return k * k;
        },
        -bound, bound, tol);
    out.second_moment = adaptive_simpson(
        [&](double x) { return x * x * kernel_eval(spec, x); }, -bound, bound, tol);
    out.squared_second_moment = adaptive_simpson(
        [&](double x) {
            const double k = kernel_eval(spec, x);
            return x * x * k * k;
        },
        -bound, bound, tol);
    return out;
}

Estimate nw_estimate_1d(const Sample1D& sample, double x, double h, const KernelSpec& spec) {
    if (sample.size() == 0) throw InsufficientDataError("empty smoothing sample");
    if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");

    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double w = kernel_eval(spec, (x - sample.x[i]) / h) / h;
        num += w * sample.y[i];
        den += w;
    }
    if (den <= 0.0) {
        return {sample.y[nearest_point_1d(sample, x)], true};
    }
    return {num / den, false};
}

namespace detail {

GridSpec resolve_grid(const Sample2D& sample, const std::optional<GridSpec>& grid) {
    if (grid) {
        if (grid->cells_per_axis < 1) throw std::invalid_argument("grid needs >= 1 cell per axis");
        return *grid;
    }
    GridSpec out;
    out.box.t_min = out.box.u_min = std::numeric_limits<double>::infinity();
    out.box.t_max = out.box.u_max = -std::numeric_limits<double>::infinity();
    for (const Vec2& p : sample.points) {
        out.box.t_min = std::min(out.box.t_min, p.t);
        out.box.t_max = std::max(out.box.t_max, p.t);
        out.box.u_min = std::min(out.box.u_min, p.u);
        out.box.u_max = std::max(out.box.u_max, p.u);
    }
    out.cells_per_axis =
        static_cast<int>(std::ceil(std::sqrt(static_cast<double>(sample.size()))));
    out.cells_per_axis = std::max(out.cells_per_axis, 1);
    return out;
}

}  // namespace detail

Estimate nw_estimate_2d(const Sample2D& sample, const Vec2& query, double b_t, double b_u,
                        const KernelSpec& spec, const std::optional<GridSpec>& grid) {
    if (sample.size() == 0) throw InsufficientDataError("empty smoothing sample");
    if (!(b_t > 0.0 && b_u > 0.0)) throw std::invalid_argument("bandwidths must be positive");

    const GridSpec g = detail::resolve_grid(sample, grid);
    const BinnedPoints bins = bin_points(sample, g);

    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double w = kernel_eval(spec, (query.t - bins.centers[i].t) / b_t) *
                         kernel_eval(spec, (query.u - bins.centers[i].u) / b_u);
        num += w * sample.y[i];
        den += w;
    }
    if (den <= 0.0) {
        return {sample.y[nearest_point_2d(sample, query)], true};
    }
    return {num / den, false};
}

double nw_unnormalized_2d(const Sample2D& sample, const Vec2& query, double b_t, double b_u,
                          const KernelSpec& spec, const std::optional<GridSpec>& grid) {
    if (sample.size() == 0) throw InsufficientDataError("empty smoothing sample");
    if (!(b_t > 0.0 && b_u > 0.0)) throw std::invalid_argument("bandwidths must be positive");

    const GridSpec g = detail::resolve_grid(sample, grid);
    const BinnedPoints bins = bin_points(sample, g);

    double sum = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double w = kernel_eval(spec, (query.t - bins.centers[i].t) / b_t) *
                         kernel_eval(spec, (query.u - bins.centers[i].u) / b_u);
        sum += w * bins.cell_area * sample.y[i];
    }
    return sum / (b_t * b_u);
}

double kde(const std::vector<Vec2>& points, const Vec2& query, const SymMat2& H) {
    if (points.empty()) throw InsufficientDataError("empty sample for density estimation");
    if (!H.positive_definite()) {
        throw std::invalid_argument("bandwidth matrix must be positive-definite");
    }
    const double det = H.det();
    // Inverse of the symmetric 2x2 bandwidth matrix.
    const double inv_tt = H.uu / det;
    const double inv_uu = H.tt / det;
    const double inv_tu = -H.tu / det;
    const double norm = 1.0 / (kTwoPi * std::sqrt(det));

    double sum = 0.0;
    for (const Vec2& p : points) {
        const double dt = query.t - p.t;
        const double du = query.u - p.u;
        const double quad = dt * dt * inv_tt + 2.0 * dt * du * inv_tu + du * du * inv_uu;
        sum += norm * std::exp(-0.5 * quad);
    }
    return sum / static_cast<double>(points.size());
}

SymMat2 empirical_covariance(const std::vector<Vec2>& points) {
    if (points.size() < 2) {
        throw InsufficientDataError("covariance needs at least 2 points");
    }
    const double n = static_cast<double>(points.size());
    Vec2 mean;
    for (const Vec2& p : points) mean += p;
    mean = mean * (1.0 / n);

    SymMat2 cov;
    for (const Vec2& p : points) {
        const double dt = p.t - mean.t;
        const double du = p.u - mean.u;
        cov.tt += dt * dt;
        cov.tu += dt * du;
        cov.uu += du * du;
    }
    return cov.scaled(1.0 / (n - 1.0));
}

SymMat2 reference_rule(const std::vector<Vec2>& points) {
    SymMat2 cov = empirical_covariance(points);
    const double trace = cov.trace();
    if (trace <= 0.0) {
        throw std::invalid_argument("reference rule needs a non-degenerate sample");
    }
    const double floor = 1e-9 * trace;
    if (cov.min_eigenvalue() < floor) {
        cov.tt += floor;
        cov.uu += floor;
    }
    const double scale = std::pow(static_cast<double>(points.size()), -1.0 / 3.0);
    return cov.scaled(scale);
}

}  // namespace kernelcf
