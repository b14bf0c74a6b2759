#include "kernelcf/layout.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "kernelcf/detail/rng.hpp"
#include "kernelcf/errors.hpp"

namespace kernelcf {

namespace {

constexpr double kCoincidentFloor = 1e-9;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Vec2 random_unit(std::mt19937_64& rng) {
    const double angle = detail::uniform(rng, 0.0, 2.0 * M_PI);
    return {std::cos(angle), std::sin(angle)};
}

}  // namespace

Vec2 attraction_force(const Vec2& p1, const Vec2& p2) {
    // F_a magnitude equals the distance, so the force is just the offset.
    return p2 - p1;
}

Vec2 repulsion_force(const Vec2& p1, const Vec2& p2, int deg1, int deg2, double k_r,
                     const Vec2& tie_direction) {
    const Vec2 offset = p1 - p2;
    const double d = offset.norm();
    const double magnitude =
        k_r * (deg1 + 1.0) * (deg2 + 1.0) / std::max(d, kCoincidentFloor);
    if (d == 0.0) return tie_direction * magnitude;
    return offset * (magnitude / d);
}

LayoutState run_layout(const SimilarityGraph& graph, const LayoutConfig& config) {
    const int n = static_cast<int>(graph.node_count());
    LayoutState state;
    std::mt19937_64 rng(config.seed);

    state.positions.resize(n);
    for (int i = 0; i < n; ++i) {
        state.positions[i].t = detail::uniform(rng, -1.0, 1.0);
        state.positions[i].u = detail::uniform(rng, -1.0, 1.0);
    }
    if (n == 0) {
        state.converged = true;
        return state;
    }

    std::vector<Vec2> forces(n);
    std::vector<Vec2> displacement(n);
    double step = config.initial_step;
    double prev_potential = std::numeric_limits<double>::infinity();

    int applied = 0;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        for (int i = 0; i < n; ++i) forces[i] = Vec2{};

        // The force field is the negative gradient of
        //   U = sum_edges sim * d^2 / 2 - sum_pairs k_r (deg_i+1)(deg_j+1) ln d,
        // tracked below as the overstep signal for the adaptive step.
        double potential = 0.0;

        // Attraction only along edges; similarity scales the pull so pairs
        // with target distance 1/sim settle closer when more similar.
        for (int i = 0; i < n; ++i) {
            for (const auto& [j, sim] : graph.neighbors(i)) {
                if (j <= i) continue;
                const Vec2 pull = attraction_force(state.positions[i], state.positions[j]) * sim;
                forces[i] += pull;
                forces[j] += pull * -1.0;
                const double d = (state.positions[i] - state.positions[j]).norm();
                potential += 0.5 * sim * d * d;
            }
        }
        // Exact pairwise repulsion.
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                Vec2 tie{1.0, 0.0};
                if (state.positions[i].t == state.positions[j].t &&
                    state.positions[i].u == state.positions[j].u) {
                    tie = random_unit(rng);
                }
                const Vec2 push = repulsion_force(state.positions[i], state.positions[j],
                                                  graph.degree(i), graph.degree(j), config.k_r,
                                                  tie);
                forces[i] += push;
                forces[j] += push * -1.0;
                const double d = std::max((state.positions[i] - state.positions[j]).norm(),
                                          kCoincidentFloor);
                potential -= config.k_r * (graph.degree(i) + 1.0) * (graph.degree(j) + 1.0) *
                             std::log(d);
            }
        }

        // Displacement follows the net force scaled by the adaptive step,
        // with its magnitude capped at the configured step length.
        double energy = 0.0;
        double total_disp = 0.0;
        for (int i = 0; i < n; ++i) {
            energy += forces[i].norm();
            displacement[i] = forces[i] * step;
            const double d = displacement[i].norm();
            if (d > config.initial_step) {
                displacement[i] = displacement[i] * (config.initial_step / d);
            }
            total_disp += displacement[i].norm();
        }

        if (total_disp / n < config.convergence_tolerance) {
            state.converged = true;
            break;
        }

        for (int i = 0; i < n; ++i) state.positions[i] += displacement[i];
        state.energy_trace.push_back(energy);
        ++applied;

        // Cool when the potential rises (overstep), recover at the inverse
        // rate otherwise, capped at the configured step.
        if (potential > prev_potential) {
            step *= 0.9;
        } else {
            step = std::min(step / 0.9, config.initial_step);
        }
        prev_potential = potential;
    }

    state.iteration = applied;
    return state;
}

void write_layout(const LayoutState& state, const std::vector<std::string>& node_ids,
                  std::ostream& out) {
    if (node_ids.size() != state.positions.size()) {
        throw std::invalid_argument("node id count does not match layout size");
    }
    out << "node_id,t,u\n";
    for (std::size_t i = 0; i < node_ids.size(); ++i) {
        out << node_ids[i] << ',' << format_double(state.positions[i].t) << ','
            << format_double(state.positions[i].u) << '\n';
    }
}

void export_layout(const LayoutState& state, const std::vector<std::string>& node_ids,
                   const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write layout file: " + path);
    write_layout(state, node_ids, out);
}

std::vector<std::pair<std::string, Vec2>> import_layout(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open layout file: " + path);

    std::vector<std::pair<std::string, Vec2>> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line == "node_id,t,u") continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw IngestError("malformed layout row: " + line);
        }
        Vec2 p;
        const std::string t_text = line.substr(c1 + 1, c2 - c1 - 1);
        const std::string u_text = line.substr(c2 + 1);
        const auto rt = std::from_chars(t_text.data(), t_text.data() + t_text.size(), p.t);
        const auto ru = std::from_chars(u_text.data(), u_text.data() + u_text.size(), p.u);
        if (rt.ec != std::errc{} || ru.ec != std::errc{}) {
            throw IngestError("malformed layout row: " + line);
        }
        out.emplace_back(line.substr(0, c1), p);
    }
    return out;
}

void export_energy_trace(const LayoutState& state, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write energy trace: " + path);
    for (double e : state.energy_trace) out << format_double(e) << '\n';
}

}  // namespace kernelcf
