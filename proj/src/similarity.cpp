#include "kernelcf/similarity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "kernelcf/errors.hpp"

namespace kernelcf {

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double profile_mean(const std::map<int, double>& p) {
    double sum = 0.0;
    for (const auto& [k, v] : p) sum += v;
    return sum / static_cast<double>(p.size());
}

int count_corated(const std::map<int, double>& a, const std::map<int, double>& b) {
    int shared = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            ++shared;
            ++ia;
            ++ib;
        }
    }
    return shared;
}

}  // namespace

SimilarityGraph::SimilarityGraph(GraphMode mode, std::vector<std::string> node_ids)
    : mode_(mode), node_ids_(std::move(node_ids)), adjacency_(node_ids_.size()) {}

int SimilarityGraph::node_index(const std::string& id) const {
    for (std::size_t i = 0; i < node_ids_.size(); ++i) {
        if (node_ids_[i] == id) return static_cast<int>(i);
    }
    return -1;
}

void SimilarityGraph::add_edge(int a, int b, double sim) {
    if (a == b) throw std::invalid_argument("self-edges are not stored");
    if (similarity(a, b)) throw std::invalid_argument("edge already stored");
    auto insert_sorted = [](std::vector<std::pair<int, double>>& adj, int node, double w) {
        auto it = std::lower_bound(adj.begin(), adj.end(), node,
                                   [](const auto& e, int n) { return e.first < n; });
        adj.insert(it, {node, w});
    };
    insert_sorted(adjacency_.at(a), b, sim);
    insert_sorted(adjacency_.at(b), a, sim);
    ++edge_count_;
}

std::optional<double> SimilarityGraph::similarity(int a, int b) const {
    const auto& adj = adjacency_.at(a);
    auto it = std::lower_bound(adj.begin(), adj.end(), b,
                               [](const auto& e, int n) { return e.first < n; });
    if (it == adj.end() || it->first != b) return std::nullopt;
    return it->second;
}

std::size_t SimilarityGraph::isolated_count() const {
    std::size_t n = 0;
    for (const auto& adj : adjacency_) {
        if (adj.empty()) ++n;
    }
    return n;
}

double cosine_similarity(const std::map<int, double>& a, const std::map<int, double>& b) {
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (const auto& [k, v] : a) norm_a += v * v;
    for (const auto& [k, v] : b) norm_b += v * v;
    if (norm_a == 0.0 || norm_b == 0.0) {
        throw UndefinedSimilarityError("cosine similarity is undefined for a zero-norm profile");
    }
    double dot = 0.0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            dot += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

double jaccard_similarity(const std::map<int, double>& a, const std::map<int, double>& b) {
    if (a.empty() && b.empty()) return 0.0;
    const int shared = count_corated(a, b);
    const int unions = static_cast<int>(a.size() + b.size()) - shared;
    return static_cast<double>(shared) / static_cast<double>(unions);
}

SimilarityGraph build_similarity_graph(const RatingsMatrix& matrix, GraphMode mode,
                                       const SimilarityOptions& options) {
    if (matrix.empty()) throw std::invalid_argument("cannot build a graph from an empty matrix");

    const bool user_mode = mode == GraphMode::User;
    const int n = static_cast<int>(user_mode ? matrix.user_count() : matrix.item_count());

    // Materialize profiles once; mean-centering applies to cosine only.
    std::vector<std::map<int, double>> profiles(n);
    for (int i = 0; i < n; ++i) {
        profiles[i] = user_mode ? matrix.user_profile(i) : matrix.item_profile(i);
        if (options.mean_center && options.metric == SimilarityMetric::Cosine &&
            !profiles[i].empty()) {
            const double mean = profile_mean(profiles[i]);
            for (auto& [k, v] : profiles[i]) v -= mean;
        }
    }

    SimilarityGraph graph(mode, user_mode ? matrix.users() : matrix.items());
    for (int i = 0; i < n; ++i) {
        if (profiles[i].empty()) continue;
        for (int j = i + 1; j < n; ++j) {
            if (profiles[j].empty()) continue;
            if (count_corated(profiles[i], profiles[j]) < options.min_corated) continue;
            double sim = 0.0;
            if (options.metric == SimilarityMetric::Cosine) {
                // Mean-centering can zero a profile; such nodes stay isolated.
                try {
                    sim = cosine_similarity(profiles[i], profiles[j]);
                } catch (const UndefinedSimilarityError&) {
                    continue;
                }
            } else {
                sim = jaccard_similarity(profiles[i], profiles[j]);
            }
            if (sim > options.edge_threshold) graph.add_edge(i, j, sim);
        }
    }
    return graph;
}

double similarity_to_distance(double sim, double sim_floor) {
    if (sim <= 0.0) {
        throw NoDistanceError("distance is undefined for non-positive similarity");
    }
    return 1.0 / std::max(sim, sim_floor);
}

void write_edge_list(const SimilarityGraph& graph, std::ostream& out) {
    out << "node_i,node_j,similarity\n";
    for (std::size_t i = 0; i < graph.node_count(); ++i) {
        for (const auto& [j, sim] : graph.neighbors(static_cast<int>(i))) {
            if (j <= static_cast<int>(i)) continue;
            out << graph.node_id(static_cast<int>(i)) << ',' << graph.node_id(j) << ','
                << format_double(sim) << '\n';
        }
    }
}

void export_edge_list(const SimilarityGraph& graph, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write edge list: " + path);
    write_edge_list(graph, out);
}

}  // namespace kernelcf
