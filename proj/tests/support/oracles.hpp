#ifndef KERNELCF_TESTS_ORACLES_HPP
#define KERNELCF_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "kernelcf/geometry.hpp"
#include "kernelcf/kernels.hpp"

// Brute-force reference computations, kept independent of the selection
// machinery they are used to check.
namespace testsupport {

inline std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double f = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
        out.push_back(lo * std::pow(hi / lo, f));
    }
    return out;
}

// Leave-one-out cross-validation score for a 1-D Nadaraya-Watson fit,
// with the weighted mean recomputed inline.
inline double loo_cv_score(const kernelcf::Sample1D& sample, double h,
                           const kernelcf::KernelSpec& spec) {
    const std::size_t n = sample.size();
    double score = 0.0;
    std::size_t scored = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double w = kernelcf::kernel_eval(spec, (sample.x[i] - sample.x[j]) / h);
            num += w * sample.y[j];
            den += w;
        }
        if (den <= 0.0) continue;  // empty window at this h; skip the point
        const double err = sample.y[i] - num / den;
        score += err * err;
        ++scored;
    }
    if (scored == 0) return std::numeric_limits<double>::infinity();
    return score / static_cast<double>(scored);
}

inline double loo_cv_minimizer(const kernelcf::Sample1D& sample,
                               const kernelcf::KernelSpec& spec,
                               const std::vector<double>& candidates) {
    double best_h = candidates.front();
    double best_score = std::numeric_limits<double>::infinity();
    for (double h : candidates) {
        const double s = loo_cv_score(sample, h, spec);
        if (s < best_score) {
            best_score = s;
            best_h = h;
        }
    }
    return best_h;
}

// Empirical MISE of the 2-D estimator against a known true surface,
// averaged over a query grid on the given region.
inline double empirical_mise_2d(const kernelcf::Sample2D& sample, double bandwidth,
                                const kernelcf::KernelSpec& spec,
                                const std::function<double(const kernelcf::Vec2&)>& truth,
                                const kernelcf::Box2& region, int grid) {
    double total = 0.0;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const kernelcf::Vec2 q{region.t_min + (i + 0.5) * region.width() / grid,
                                   region.u_min + (j + 0.5) * region.height() / grid};
            const double est =
                kernelcf::nw_estimate_2d(sample, q, bandwidth, bandwidth, spec).value;
            const double err = est - truth(q);
            total += err * err;
        }
    }
    return total / static_cast<double>(grid) / static_cast<double>(grid);
}

inline double mise_minimizer_2d(const kernelcf::Sample2D& sample,
                                const kernelcf::KernelSpec& spec,
                                const std::function<double(const kernelcf::Vec2&)>& truth,
                                const kernelcf::Box2& region, int grid,
                                const std::vector<double>& candidates) {
    double best_b = candidates.front();
    double best_score = std::numeric_limits<double>::infinity();
    for (double b : candidates) {
        const double s = empirical_mise_2d(sample, b, spec, truth, region, grid);
        if (s < best_score) {
            best_score = s;
            best_b = b;
        }
    }
    return best_b;
}

struct ClusterStats {
    double inter_centroid = 0.0;
    double mean_intra_pairwise = 0.0;
};

// Distance statistics for two planted clusters laid out in 2-D; nodes
// [0, size) belong to cluster A, [size, 2*size) to cluster B.
inline ClusterStats cluster_separation(const std::vector<kernelcf::Vec2>& positions, int size) {
    kernelcf::Vec2 ca, cb;
    for (int i = 0; i < size; ++i) ca += positions[i];
    for (int i = size; i < 2 * size; ++i) cb += positions[i];
    ca = ca * (1.0 / size);
    cb = cb * (1.0 / size);

    double intra = 0.0;
    int pairs = 0;
    for (int c = 0; c < 2; ++c) {
        const int base = c * size;
        for (int i = 0; i < size; ++i) {
            for (int j = i + 1; j < size; ++j) {
                intra += (positions[base + i] - positions[base + j]).norm();
                ++pairs;
            }
        }
    }
    return {(ca - cb).norm(), intra / pairs};
}

}  // namespace testsupport

#endif
