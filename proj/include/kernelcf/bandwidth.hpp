#ifndef KERNELCF_BANDWIDTH_HPP
#define KERNELCF_BANDWIDTH_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>

#include "kernelcf/geometry.hpp"
#include "kernelcf/kernels.hpp"

namespace kernelcf {

// Global quadratic surface a0 + a1 t + a2 u + a3 t^2 + a4 t u + a5 u^2.
struct SurfaceFit {
    std::array<double, 6> coeff{};
    // OLS standard errors (translation-invariant for the quadratic terms);
    // zero on an exact fit.
    std::array<double, 6> coeff_se{};
    double residual_variance = 0.0;

    double eval(const Vec2& p) const {
        return coeff[0] + coeff[1] * p.t + coeff[2] * p.u + coeff[3] * p.t * p.t +
               coeff[4] * p.t * p.u + coeff[5] * p.u * p.u;
    }
    // Second partials of a quadratic are constants.
    double second_tt() const { return 2.0 * coeff[3]; }
    double second_uu() const { return 2.0 * coeff[5]; }
};

// Ordinary least squares over the six quadratic terms; requires n >= 6.
// Throws FitError naming the deficient direction on a collinear layout.
SurfaceFit fit_quadratic_surface(const Sample2D& sample);

// Curvature and density functionals over region A with indicator weight.
struct FunctionalSet {
    double i_tt = 0.0;  // ∫ r_tt^2
    double i_uu = 0.0;  // ∫ r_uu^2
    double i_tu = 0.0;  // ∫ r_tt r_uu
    double i_f = 0.0;   // ∫ 1/f
    // Sampling-noise floors: curvature below two standard errors is
    // statistically zero, so such functionals route to the fallback
    // instead of dividing the plug-in formula by noise.
    double i_tt_floor = 0.0;
    double i_uu_floor = 0.0;
    Box2 region;
    std::string weight = "indicator";
};

// Midpoint-rule quadrature on grid_resolution^2 cells; density values are
// floored at 1e-3 * max before inversion.
FunctionalSet compute_functionals(const SurfaceFit& fit,
                                  const std::function<double(const Vec2&)>& density,
                                  const Box2& region, int grid_resolution);

struct BandwidthPair {
    double b_t = 0.0;
    double b_u = 0.0;
    bool fallback = false;
    FunctionalSet functionals;
    double sigma2 = 0.0;
    std::size_t n = 0;
};

// Plug-in 2-D bandwidths:
//   b_t = (σ² R(K)² I_uu^{3/4} I_f / (μ2² I_tt^{3/4} (I_tt^{1/2} I_uu^{1/2} + I_tu) n))^{1/6}
//   b_u = (I_tt / I_uu)^{1/4} b_t
// Degenerate functionals fall back to n^{-1/6} * geometric-mean region extent.
BandwidthPair bandwidth_2d(const FunctionalSet& functionals, double sigma2,
                           const KernelConstants& constants, std::size_t n);

// Estimated pieces of the 1-D plug-in formula, kept for diagnostics and for
// the frozen-functional scaling tests.
struct Functionals1D {
    double sigma2 = 0.0;
    double roughness = 0.0;
    double squared_second_moment = 0.0;
    double integral_inv_density = 0.0;
    double curvature = 0.0;  // ∫ (r'' + 2 r' f'/f)^2
    double sample_range = 0.0;
};

struct Bandwidth1D {
    double value = 0.0;
    bool fallback = false;
    Functionals1D provenance;
};

// h = n^{-1/5} (σ² R(K) ∫dx/f / ((∫x²K²)² ∫(r'' + 2 r' f'/f)²))^{1/5};
// degeneracy falls back to n^{-1/5} * sample range.
Bandwidth1D bandwidth_1d_from_functionals(const Functionals1D& f, std::size_t n);

// Full 1-D plug-in path: σ² from first differences, f from a Gaussian KDE
// with the reference-rule bandwidth, r from a pilot NW fit at pilot_h
// differentiated numerically, all integrals by midpoint quadrature over the
// sample range. Requires n >= 4.
Bandwidth1D bandwidth_1d(const Sample1D& sample, const KernelSpec& spec,
                         const KernelConstants& constants, double pilot_h);

// Rice first-difference estimator over sorted x. Requires n >= 2.
double estimate_sigma2(const Sample1D& sample);

// Residual variance of the global quadratic fit. Requires n >= 6.
double estimate_sigma2(const Sample2D& sample);

// Key-value diagnostic dump: functional values, σ̂², bandwidths, fallbacks.
void write_bandwidth_diagnostics(const BandwidthPair& pair, std::ostream& out);

}  // namespace kernelcf

#endif
