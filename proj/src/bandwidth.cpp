#include "kernelcf/bandwidth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "kernelcf/errors.hpp"

namespace kernelcf {

namespace {

constexpr double kDegenerateFunctional = 1e-12;

const char* kBasisNames[6] = {"1", "t", "u", "t^2", "t*u", "u^2"};

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Gauss-Jordan inverse of the normal matrix, columns kept in basis order so
// a vanishing pivot names the deficient direction. The inverse diagonal
// supplies the coefficient standard errors.
std::array<std::array<double, 6>, 6> invert_normal_matrix(
    std::array<std::array<double, 6>, 6> a) {
    double scale = 0.0;
    for (int i = 0; i < 6; ++i) scale = std::max(scale, std::abs(a[i][i]));
    const double pivot_floor = std::max(scale, 1.0) * 1e-12;

    std::array<std::array<double, 6>, 6> inv{};
    for (int i = 0; i < 6; ++i) inv[i][i] = 1.0;

    for (int col = 0; col < 6; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 6; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        }
        if (std::abs(a[pivot][col]) < pivot_floor) {
            throw FitError(std::string("rank-deficient design: no variation along ") +
                           kBasisNames[col]);
        }
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const double d = a[col][col];
        for (int k = 0; k < 6; ++k) {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for (int row = 0; row < 6; ++row) {
            if (row == col) continue;
            const double f = a[row][col];
            if (f == 0.0) continue;
            for (int k = 0; k < 6; ++k) {
                a[row][k] -= f * a[col][k];
                inv[row][k] -= f * inv[col][k];
            }
        }
    }
    return inv;
}

double geometric_extent(const Box2& box) {
    const double g = std::sqrt(std::max(box.width(), 0.0) * std::max(box.height(), 0.0));
    return g > 0.0 ? g : 1.0;
}

bool usable(double bandwidth) { return std::isfinite(bandwidth) && bandwidth > 0.0; }

// Gaussian KDE over 1-D points with a scalar reference-rule variance
// h2 = n^{-1/3} * sample variance, mirroring the 2-D rule.
struct Kde1D {
    std::vector<double> points;
    double h2 = 0.0;

    explicit Kde1D(const std::vector<double>& x) : points(x) {
        const double n = static_cast<double>(x.size());
        double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
        double var = 0.0;
        for (double v : x) var += (v - mean) * (v - mean);
        var /= (n - 1.0);
        h2 = std::pow(n, -1.0 / 3.0) * var;
        if (!(h2 > 0.0)) h2 = 1.0;  // coincident sample; density unused downstream
    }

    double density(double z) const {
        const double norm = 1.0 / std::sqrt(2.0 * M_PI * h2);
        double sum = 0.0;
        for (double p : points) {
            const double d = z - p;
            sum += norm * std::exp(-0.5 * d * d / h2);
        }
        return sum / static_cast<double>(points.size());
    }

    double density_derivative(double z) const {
        const double norm = 1.0 / std::sqrt(2.0 * M_PI * h2);
        double sum = 0.0;
        for (double p : points) {
            const double d = z - p;
            sum += norm * std::exp(-0.5 * d * d / h2) * (-d / h2);
        }
        return sum / static_cast<double>(points.size());
    }
};

}  // namespace

SurfaceFit fit_quadratic_surface(const Sample2D& sample) {
    const std::size_t n = sample.size();
    if (n < 6) throw InsufficientDataError("quadratic surface fit needs at least 6 points");

    // Center coordinates for conditioning; expand back afterwards.
    double ct = 0.0;
    double cu = 0.0;
    for (const Vec2& p : sample.points) {
        ct += p.t;
        cu += p.u;
    }
    ct /= static_cast<double>(n);
    cu /= static_cast<double>(n);

    std::array<std::array<double, 6>, 6> ata{};
    std::array<double, 6> aty{};
    for (std::size_t i = 0; i < n; ++i) {
        const double t = sample.points[i].t - ct;
        const double u = sample.points[i].u - cu;
        const std::array<double, 6> row = {1.0, t, u, t * t, t * u, u * u};
        for (int r = 0; r < 6; ++r) {
            aty[r] += row[r] * sample.y[i];
            for (int c = 0; c < 6; ++c) ata[r][c] += row[r] * row[c];
        }
    }

    const std::array<std::array<double, 6>, 6> inv = invert_normal_matrix(ata);
    std::array<double, 6> b{};
    for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) b[r] += inv[r][c] * aty[c];
    }

    SurfaceFit fit;
    fit.coeff[3] = b[3];
    fit.coeff[4] = b[4];
    fit.coeff[5] = b[5];
    fit.coeff[1] = b[1] - 2.0 * b[3] * ct - b[4] * cu;
    fit.coeff[2] = b[2] - 2.0 * b[5] * cu - b[4] * ct;
    fit.coeff[0] = b[0] - b[1] * ct - b[2] * cu + b[3] * ct * ct + b[4] * ct * cu + b[5] * cu * cu;

    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = sample.y[i] - fit.eval(sample.points[i]);
        rss += r * r;
    }
    fit.residual_variance = n > 6 ? rss / static_cast<double>(n - 6) : 0.0;
    for (int k = 0; k < 6; ++k) {
        fit.coeff_se[k] = std::sqrt(std::max(fit.residual_variance * inv[k][k], 0.0));
    }
    return fit;
}

FunctionalSet compute_functionals(const SurfaceFit& fit,
                                  const std::function<double(const Vec2&)>& density,
                                  const Box2& region, int grid_resolution) {
    if (!(region.area() > 0.0)) throw std::invalid_argument("region must have positive area");
    if (grid_resolution < 1) throw std::invalid_argument("grid resolution must be >= 1");

    const int m = grid_resolution;
    const double wt = region.width() / m;
    const double wu = region.height() / m;
    const double cell = wt * wu;

    // Quadratic fit makes the curvature integrands constant over the region.
    const double r_tt = fit.second_tt();
    const double r_uu = fit.second_uu();

    FunctionalSet out;
    out.region = region;
    out.i_tt = r_tt * r_tt * region.area();
    out.i_uu = r_uu * r_uu * region.area();
    out.i_tu = r_tt * r_uu * region.area();
    // Two-standard-error floors: se(r_tt) = 2 se(a3), se(r_uu) = 2 se(a5).
    const double tt_noise = 4.0 * fit.coeff_se[3];
    const double uu_noise = 4.0 * fit.coeff_se[5];
    out.i_tt_floor = tt_noise * tt_noise * region.area();
    out.i_uu_floor = uu_noise * uu_noise * region.area();

    // Two passes for I_f: find the density peak, then floor before inverting.
    std::vector<double> f_values;
    f_values.reserve(static_cast<std::size_t>(m) * m);
    double f_max = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const Vec2 center{region.t_min + (i + 0.5) * wt, region.u_min + (j + 0.5) * wu};
            const double f = density(center);
            f_values.push_back(f);
            f_max = std::max(f_max, f);
        }
    }
    const double floor = f_max > 0.0 ? 1e-3 * f_max : 1.0;
    double i_f = 0.0;
    for (double f : f_values) i_f += cell / std::max(f, floor);
    out.i_f = i_f;
    return out;
}

BandwidthPair bandwidth_2d(const FunctionalSet& functionals, double sigma2,
                           const KernelConstants& constants, std::size_t n) {
    if (n < 1) throw std::invalid_argument("sample size must be >= 1");
    if (sigma2 < 0.0) throw std::invalid_argument("noise variance cannot be negative");

    BandwidthPair out;
    out.functionals = functionals;
    out.sigma2 = sigma2;
    out.n = n;

    const double i_tt = functionals.i_tt;
    const double i_uu = functionals.i_uu;
    const double nn = static_cast<double>(n);

    bool degenerate = i_tt < std::max(kDegenerateFunctional, functionals.i_tt_floor) ||
                      i_uu < std::max(kDegenerateFunctional, functionals.i_uu_floor);
    if (!degenerate) {
        const double cross = std::sqrt(i_tt) * std::sqrt(i_uu) + functionals.i_tu;
        const double numerator = sigma2 * constants.roughness * constants.roughness *
                                 std::pow(i_uu, 0.75) * functionals.i_f;
        const double denominator = constants.second_moment * constants.second_moment *
                                   std::pow(i_tt, 0.75) * cross * nn;
        if (denominator > 0.0) {
            out.b_t = std::pow(numerator / denominator, 1.0 / 6.0);
            out.b_u = std::pow(i_tt / i_uu, 0.25) * out.b_t;
        }
        degenerate = !usable(out.b_t) || !usable(out.b_u);
    }

    if (degenerate) {
        const double fallback =
            std::pow(nn, -1.0 / 6.0) * geometric_extent(functionals.region);
        out.b_t = fallback;
        out.b_u = fallback;
        out.fallback = true;
    }
    return out;
}

Bandwidth1D bandwidth_1d_from_functionals(const Functionals1D& f, std::size_t n) {
    if (n < 1) throw std::invalid_argument("sample size must be >= 1");

    Bandwidth1D out;
    out.provenance = f;

    const double nn = static_cast<double>(n);
    const double numerator = f.sigma2 * f.roughness * f.integral_inv_density;
    const double denominator =
        f.squared_second_moment * f.squared_second_moment * f.curvature;
    if (f.curvature >= kDegenerateFunctional && denominator > 0.0) {
        out.value = std::pow(nn, -0.2) * std::pow(numerator / denominator, 0.2);
    }
    if (!usable(out.value)) {
        const double range = f.sample_range > 0.0 ? f.sample_range : 1.0;
        out.value = std::pow(nn, -0.2) * range;
        out.fallback = true;
    }
    return out;
}

Bandwidth1D bandwidth_1d(const Sample1D& sample, const KernelSpec& spec,
                         const KernelConstants& constants, double pilot_h) {
    const std::size_t n = sample.size();
    if (n < 4) throw InsufficientDataError("1-D plug-in needs at least 4 points");
    if (!(pilot_h > 0.0)) throw std::invalid_argument("pilot bandwidth must be positive");

    const auto [min_it, max_it] = std::minmax_element(sample.x.begin(), sample.x.end());
    const double range = *max_it - *min_it;

    Functionals1D f;
    f.sigma2 = estimate_sigma2(sample);
    f.roughness = constants.roughness;
    f.squared_second_moment = constants.squared_second_moment;
    f.sample_range = range;

    if (range > 0.0) {
        const Kde1D density(sample.x);
        const auto pilot = [&](double z) { return nw_estimate_1d(sample, z, pilot_h, spec).value; };
        const double delta = std::min(0.25 * pilot_h, 0.1 * range);

        // Midpoint quadrature over the sample range.
        const int cells = 256;
        const double w = range / cells;
        std::vector<double> f_values(cells);
        double f_max = 0.0;
        for (int i = 0; i < cells; ++i) {
            f_values[i] = density.density(*min_it + (i + 0.5) * w);
            f_max = std::max(f_max, f_values[i]);
        }
        const double floor = f_max > 0.0 ? 1e-3 * f_max : 1.0;

        double inv_f = 0.0;
        double curvature = 0.0;
        for (int i = 0; i < cells; ++i) {
            const double z = *min_it + (i + 0.5) * w;
            const double fz = std::max(f_values[i], floor);
            inv_f += w / fz;

            const double r_minus = pilot(z - delta);
            const double r_mid = pilot(z);
            const double r_plus = pilot(z + delta);
            const double r1 = (r_plus - r_minus) / (2.0 * delta);
            const double r2 = (r_plus - 2.0 * r_mid + r_minus) / (delta * delta);
            const double drift = density.density_derivative(z) / fz;
            const double g = r2 + 2.0 * r1 * drift;
            curvature += w * g * g;
        }
        f.integral_inv_density = inv_f;
        f.curvature = curvature;
    }

    return bandwidth_1d_from_functionals(f, n);
}

double estimate_sigma2(const Sample1D& sample) {
    const std::size_t n = sample.size();
    if (n < 2) throw InsufficientDataError("noise estimation needs at least 2 points");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sample.x[a] < sample.x[b]; });

    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = sample.y[order[i + 1]] - sample.y[order[i]];
        sum += d * d;
    }
    return sum / (2.0 * static_cast<double>(n - 1));
}

double estimate_sigma2(const Sample2D& sample) {
    return fit_quadratic_surface(sample).residual_variance;
}

void write_bandwidth_diagnostics(const BandwidthPair& pair, std::ostream& out) {
    out << "n = " << pair.n << '\n';
    out << "sigma2 = " << format_double(pair.sigma2) << '\n';
    out << "i_tt = " << format_double(pair.functionals.i_tt) << '\n';
    out << "i_uu = " << format_double(pair.functionals.i_uu) << '\n';
    out << "i_tu = " << format_double(pair.functionals.i_tu) << '\n';
    out << "i_f = " << format_double(pair.functionals.i_f) << '\n';
    out << "i_tt_floor = " << format_double(pair.functionals.i_tt_floor) << '\n';
    out << "i_uu_floor = " << format_double(pair.functionals.i_uu_floor) << '\n';
    out << "region_t_min = " << format_double(pair.functionals.region.t_min) << '\n';
    out << "region_t_max = " << format_double(pair.functionals.region.t_max) << '\n';
    out << "region_u_min = " << format_double(pair.functionals.region.u_min) << '\n';
    out << "region_u_max = " << format_double(pair.functionals.region.u_max) << '\n';
    out << "weight = " << pair.functionals.weight << '\n';
    out << "b_t = " << format_double(pair.b_t) << '\n';
    out << "b_u = " << format_double(pair.b_u) << '\n';
    out << "fallback = " << (pair.fallback ? "true" : "false") << '\n';
}

}  // namespace kernelcf
