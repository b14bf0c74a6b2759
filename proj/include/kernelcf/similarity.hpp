#ifndef KERNELCF_SIMILARITY_HPP
#define KERNELCF_SIMILARITY_HPP

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kernelcf/ratings.hpp"

namespace kernelcf {

enum class GraphMode { User, Item };
enum class SimilarityMetric { Cosine, Jaccard };

struct SimilarityOptions {
    SimilarityMetric metric = SimilarityMetric::Cosine;
    // Edge stored iff similarity strictly exceeds this (positivity rule).
    double edge_threshold = 0.0;
    // Subtract each profile's own mean before cosine.
    bool mean_center = false;
    // Pairs sharing fewer co-rated entries are skipped.
    int min_corated = 1;
};

// Symmetric weighted graph over users or items. Isolated nodes are kept.
class SimilarityGraph {
public:
    SimilarityGraph(GraphMode mode, std::vector<std::string> node_ids);

    GraphMode mode() const { return mode_; }
    std::size_t node_count() const { return node_ids_.size(); }
    const std::vector<std::string>& node_ids() const { return node_ids_; }
    const std::string& node_id(int index) const { return node_ids_.at(index); }
    int node_index(const std::string& id) const;

    // Stores both directions; rejects self-edges and duplicates.
    void add_edge(int a, int b, double similarity);

    const std::vector<std::pair<int, double>>& neighbors(int node) const {
        return adjacency_.at(node);
    }
    std::optional<double> similarity(int a, int b) const;
    int degree(int node) const { return static_cast<int>(adjacency_.at(node).size()); }
    std::size_t edge_count() const { return edge_count_; }
    std::size_t isolated_count() const;

private:
    GraphMode mode_;
    std::vector<std::string> node_ids_;
    std::vector<std::vector<std::pair<int, double>>> adjacency_;
    std::size_t edge_count_ = 0;
};

// Cosine over the full co-ordinate axis (missing entries are zero).
// Throws UndefinedSimilarityError when either profile has zero norm.
double cosine_similarity(const std::map<int, double>& a, const std::map<int, double>& b);

// |a ∩ b| / |a ∪ b| over the profile key sets; 0 when both are empty.
double jaccard_similarity(const std::map<int, double>& a, const std::map<int, double>& b);

SimilarityGraph build_similarity_graph(const RatingsMatrix& matrix, GraphMode mode,
                                       const SimilarityOptions& options = {});

// d = 1/sim, capped at 1/sim_floor for tiny positive similarities.
// Throws NoDistanceError for sim <= 0.
double similarity_to_distance(double sim, double sim_floor = 1e-6);

// Edge list "node_i,node_j,similarity", one row per undirected edge.
void export_edge_list(const SimilarityGraph& graph, const std::string& path);
void write_edge_list(const SimilarityGraph& graph, std::ostream& out);

}  // namespace kernelcf

#endif
