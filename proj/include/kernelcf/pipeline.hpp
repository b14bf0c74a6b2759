#ifndef KERNELCF_PIPELINE_HPP
#define KERNELCF_PIPELINE_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kernelcf/bandwidth.hpp"
#include "kernelcf/kernels.hpp"
#include "kernelcf/layout.hpp"
#include "kernelcf/ratings.hpp"
#include "kernelcf/similarity.hpp"

namespace kernelcf {

enum class CfMethod { ClassicUser, ClassicItem, KernelCf };

// Kernel mode weights neighbors with the product kernel inside the window;
// Similarity mode reproduces classic CF arithmetic exactly (no window,
// raw similarities as weights).
enum class WeightScheme { Kernel, Similarity };

struct PipelineConfig {
    KernelFamily kernel = KernelFamily::Epanechnikov;
    SimilarityMetric metric = SimilarityMetric::Cosine;
    GraphMode mode = GraphMode::User;
    double edge_threshold = 0.0;
    bool mean_center = false;
    int min_corated = 1;
    double sim_floor = 1e-6;
    LayoutConfig layout;
    // Midpoint grid for the curvature/density functionals.
    int functional_grid = 64;
    WeightScheme weight_scheme = WeightScheme::Kernel;
    bool fallback_enabled = true;
    double holdout = 0.2;
    std::uint64_t seed = 0;
    int top_n = 10;
};

// Flat "key = value" config file; '#' starts a comment. Unknown keys throw.
PipelineConfig parse_config(std::istream& in);
PipelineConfig load_config(const std::string& path);

struct Prediction {
    std::string user_id;
    std::string item_id;
    double score = 0.0;
    CfMethod method = CfMethod::ClassicUser;
    int neighborhood_size = 0;
    bool fallback = false;
};

// Classic user-CF: similarity-weighted mean of neighbor ratings on the
// item; empty neighborhoods fall back to item mean, then global mean.
Prediction user_cf_predict(const RatingsMatrix& train, const SimilarityGraph& graph,
                           const std::string& user, const std::string& item,
                           bool fallback_enabled = true);

// Classic item-CF: weights are similarities between the target item and
// the items the user has rated.
Prediction item_cf_predict(const RatingsMatrix& train, const SimilarityGraph& graph,
                           const std::string& user, const std::string& item,
                           bool fallback_enabled = true);

// Trained Kernel-CF state: similarity graph, its 2-D layout, and the
// plug-in bandwidths selected over the layout sample.
class KernelCfModel {
public:
    static KernelCfModel fit(const RatingsMatrix& train, const PipelineConfig& config);

    Prediction predict(const std::string& user, const std::string& item) const;
    std::vector<Prediction> recommend(const std::string& user, int top_n) const;

    // Index-based prediction for evaluation loops; nullopt when no score
    // can be produced (empty window with fallback disabled).
    std::optional<Prediction> try_predict(int user, int item) const;

    // Candidate neighbors of a node after the kernel-window filter.
    std::vector<int> window_neighbors(int node) const;

    const RatingsMatrix& train() const { return train_; }
    const SimilarityGraph& graph() const { return graph_; }
    const LayoutState& layout() const { return layout_; }
    const BandwidthPair& bandwidths() const { return bandwidths_; }
    const PipelineConfig& config() const { return config_; }

private:
    KernelCfModel(RatingsMatrix train, PipelineConfig config, SimilarityGraph graph,
                  LayoutState layout, BandwidthPair bandwidths);

    double window_weight(int center, int neighbor) const;
    std::optional<Prediction> predict_indexed(int user, int item, bool allow_fallback) const;

    RatingsMatrix train_;
    PipelineConfig config_;
    SimilarityGraph graph_;
    LayoutState layout_;
    BandwidthPair bandwidths_;
};

// Convenience wrapper over KernelCfModel::fit + recommend.
std::vector<Prediction> kernel_cf_recommend(const RatingsMatrix& train,
                                            const PipelineConfig& config,
                                            const std::string& user, int top_n);

struct MethodStats {
    std::string method;
    double rmse = 0.0;
    double mae = 0.0;
    double coverage = 0.0;
    double fallback_rate = 0.0;
    std::size_t predicted = 0;
    std::size_t tested = 0;
};

struct EvalReport {
    std::vector<MethodStats> methods;
    std::uint64_t seed = 0;
    double holdout = 0.0;
};

// Predicts every test pair from train only. Throws on an empty test set.
EvalReport evaluate(const DatasetSplit& split, CfMethod method, const PipelineConfig& config);

// Side-by-side report for classic-user, classic-item and kernel-cf.
EvalReport evaluate_all(const DatasetSplit& split, const PipelineConfig& config);

std::string method_name(CfMethod method);

// Deterministic key-value report text.
std::string format_report(const EvalReport& report);
void write_report(const EvalReport& report, const std::string& path);

}  // namespace kernelcf

#endif
