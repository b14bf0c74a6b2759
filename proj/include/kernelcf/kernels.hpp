#ifndef KERNELCF_KERNELS_HPP
#define KERNELCF_KERNELS_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "kernelcf/geometry.hpp"

namespace kernelcf {

enum class KernelFamily { Epanechnikov, Gaussian, Uniform };

struct KernelSpec {
    KernelFamily family = KernelFamily::Epanechnikov;

    bool compact_support() const { return family != KernelFamily::Gaussian; }
};

// Kernel constants entering the bandwidth formulas:
//   roughness            R(K)  = ∫ K(x)^2 dx
//   second_moment        μ2(K) = ∫ x^2 K(x) dx
//   squared_second_moment       ∫ x^2 K(x)^2 dx
struct KernelConstants {
    double roughness = 0.0;
    double second_moment = 0.0;
    double squared_second_moment = 0.0;
};

double kernel_eval(const KernelSpec& spec, double x);

// Constants computed by adaptive quadrature (absolute tolerance 1e-10).
KernelConstants kernel_constants(const KernelSpec& spec);

struct Sample1D {
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const { return x.size(); }
};

struct Sample2D {
    std::vector<Vec2> points;
    std::vector<double> y;

    std::size_t size() const { return points.size(); }
};

// Smoothing result; fallback marks the nearest-neighbor answer returned
// when every kernel weight in the window is zero.
struct Estimate {
    double value = 0.0;
    bool fallback = false;
};

// Nadaraya-Watson local mean with weights K((x - x_i)/h)/h.
Estimate nw_estimate_1d(const Sample1D& sample, double x, double h, const KernelSpec& spec);

// Binning grid for the 2-D estimator. Defaults to the sample bounding box
// with ceil(sqrt(n)) cells per axis.
struct GridSpec {
    Box2 box;
    int cells_per_axis = 0;
};

// Binned 2-D estimator: each point contributes the product-kernel value at
// its cell center, normalized so constant responses are reproduced.
Estimate nw_estimate_2d(const Sample2D& sample, const Vec2& query, double b_t, double b_u,
                        const KernelSpec& spec, const std::optional<GridSpec>& grid = std::nullopt);

// Unnormalized form: b_t^-1 b_u^-1 Σ_i K((t-c_t)/b_t) K((u-c_u)/b_u) |A_i| Y_i
// with cell centers c and equal cell areas |A_i|.
double nw_unnormalized_2d(const Sample2D& sample, const Vec2& query, double b_t, double b_u,
                          const KernelSpec& spec, const std::optional<GridSpec>& grid = std::nullopt);

// 2-D Gaussian kernel density estimate with bandwidth matrix H.
// Throws std::invalid_argument when H is not positive-definite.
double kde(const std::vector<Vec2>& points, const Vec2& query, const SymMat2& H);

// Unbiased (n-1 denominator) covariance. Throws InsufficientDataError for n < 2.
SymMat2 empirical_covariance(const std::vector<Vec2>& points);

// H = n^(-1/3) * empirical covariance; a degenerate axis is floored by
// adding (1e-9 * trace) * I before scaling.
SymMat2 reference_rule(const std::vector<Vec2>& points);

namespace detail {
// Resolves the effective binning grid for a 2-D sample.
GridSpec resolve_grid(const Sample2D& sample, const std::optional<GridSpec>& grid);
}  // namespace detail

}  // namespace kernelcf

#endif
