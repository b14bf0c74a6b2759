#ifndef KERNELCF_LAYOUT_HPP
#define KERNELCF_LAYOUT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "kernelcf/geometry.hpp"
#include "kernelcf/similarity.hpp"

namespace kernelcf {

struct LayoutConfig {
    double k_r = 10.0;
    int max_iterations = 1000;
    double initial_step = 0.1;
    double convergence_tolerance = 1e-4;
    std::uint64_t seed = 0;
};

struct LayoutState {
    std::vector<Vec2> positions;
    int iteration = 0;
    bool converged = false;
    // Sum of per-node net force magnitudes, one entry per applied iteration.
    std::vector<double> energy_trace;
};

// Force on n1 pulling it toward n2; magnitude equals the point distance.
// Coincident points feel no attraction.
Vec2 attraction_force(const Vec2& p1, const Vec2& p2);

// Force on n1 pushing it away from n2 with magnitude
// k_r * (deg1+1) * (deg2+1) / distance. For coincident points the distance
// is floored at 1e-9 and the push goes along tie_direction.
Vec2 repulsion_force(const Vec2& p1, const Vec2& p2, int deg1, int deg2, double k_r,
                     const Vec2& tie_direction = Vec2{1.0, 0.0});

// Force-directed embedding of the similarity graph into 2-D. Attraction on
// an edge is scaled by its similarity so tighter pairs land closer; the
// step shrinks whenever total energy rises. Deterministic for a fixed seed.
LayoutState run_layout(const SimilarityGraph& graph, const LayoutConfig& config = {});

// "node_id,t,u" rows with shortest round-trip float formatting.
void export_layout(const LayoutState& state, const std::vector<std::string>& node_ids,
                   const std::string& path);
void write_layout(const LayoutState& state, const std::vector<std::string>& node_ids,
                  std::ostream& out);
std::vector<std::pair<std::string, Vec2>> import_layout(const std::string& path);

// Optional diagnostics: one energy value per line.
void export_energy_trace(const LayoutState& state, const std::string& path);

}  // namespace kernelcf

#endif
