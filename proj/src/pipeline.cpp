#include "kernelcf/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "kernelcf/errors.hpp"

namespace kernelcf {

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    double out = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
        throw std::invalid_argument("config key '" + key + "' expects a number, got '" + value +
                                    "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config key '" + key + "' expects true/false, got '" + value +
                                "'");
}

struct WeightedRating {
    double weight;
    double rating;
};

// Shared weighted-mean core of the classic CF predictions.
std::optional<double> weighted_mean(const std::vector<WeightedRating>& terms) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& t : terms) {
        num += t.weight * t.rating;
        den += t.weight;
    }
    if (den <= 0.0) return std::nullopt;
    return num / den;
}

// Fallback chain: item mean, then global mean.
std::optional<double> fallback_score(const RatingsMatrix& train, int item) {
    if (auto mean = train.item_mean(item)) return mean;
    if (!train.empty()) return train.global_mean();
    return std::nullopt;
}

std::optional<Prediction> classic_predict_indexed(const RatingsMatrix& train,
                                                  const SimilarityGraph& graph, int user,
                                                  int item, CfMethod method,
                                                  bool fallback_enabled) {
    std::vector<WeightedRating> terms;
    if (method == CfMethod::ClassicUser) {
        for (const auto& [k, sim] : graph.neighbors(user)) {
            if (auto r = train.rating(k, item)) terms.push_back({sim, *r});
        }
    } else {
        // Item neighbors of the target item that the user has rated.
        for (const auto& [k, sim] : graph.neighbors(item)) {
            if (auto r = train.rating(user, k)) terms.push_back({sim, *r});
        }
    }

    Prediction p;
    p.user_id = train.user_id(user);
    p.item_id = train.item_id(item);
    p.method = method;
    p.neighborhood_size = static_cast<int>(terms.size());

    if (auto score = weighted_mean(terms)) {
        p.score = *score;
        return p;
    }
    if (!fallback_enabled) return std::nullopt;
    if (auto score = fallback_score(train, item)) {
        p.score = *score;
        p.fallback = true;
        p.neighborhood_size = 0;
        return p;
    }
    return std::nullopt;
}

void check_ids(const RatingsMatrix& train, const std::string& user, const std::string& item,
               int& u, int& i) {
    u = train.user_index(user);
    if (u < 0) throw LookupError("unknown user id: " + user);
    i = train.item_index(item);
    if (i < 0) throw LookupError("unknown item id: " + item);
}

}  // namespace

PipelineConfig parse_config(std::istream& in) {
    PipelineConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "config line " << line_no << " is not 'key = value': " << line;
            throw std::invalid_argument(msg.str());
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "kernel") {
            if (value == "epanechnikov")
                config.kernel = KernelFamily::Epanechnikov;
            else if (value == "gaussian")
                config.kernel = KernelFamily::Gaussian;
            else if (value == "uniform")
                config.kernel = KernelFamily::Uniform;
            else
                throw std::invalid_argument("unknown kernel: " + value);
        } else if (key == "metric") {
            if (value == "cosine")
                config.metric = SimilarityMetric::Cosine;
            else if (value == "jaccard")
                config.metric = SimilarityMetric::Jaccard;
            else
                throw std::invalid_argument("unknown metric: " + value);
        } else if (key == "mode") {
            if (value == "user")
                config.mode = GraphMode::User;
            else if (value == "item")
                config.mode = GraphMode::Item;
            else
                throw std::invalid_argument("unknown mode: " + value);
        } else if (key == "weight_scheme") {
            if (value == "kernel")
                config.weight_scheme = WeightScheme::Kernel;
            else if (value == "similarity")
                config.weight_scheme = WeightScheme::Similarity;
            else
                throw std::invalid_argument("unknown weight_scheme: " + value);
        } else if (key == "edge_threshold") {
            config.edge_threshold = parse_number(key, value);
        } else if (key == "mean_center") {
            config.mean_center = parse_bool(key, value);
        } else if (key == "min_corated") {
            config.min_corated = static_cast<int>(parse_number(key, value));
        } else if (key == "sim_floor") {
            config.sim_floor = parse_number(key, value);
        } else if (key == "k_r") {
            config.layout.k_r = parse_number(key, value);
        } else if (key == "max_iterations") {
            config.layout.max_iterations = static_cast<int>(parse_number(key, value));
        } else if (key == "initial_step") {
            config.layout.initial_step = parse_number(key, value);
        } else if (key == "convergence_tolerance") {
            config.layout.convergence_tolerance = parse_number(key, value);
        } else if (key == "functional_grid") {
            config.functional_grid = static_cast<int>(parse_number(key, value));
        } else if (key == "fallback") {
            config.fallback_enabled = parse_bool(key, value);
        } else if (key == "holdout") {
            config.holdout = parse_number(key, value);
        } else if (key == "seed") {
            config.seed = static_cast<std::uint64_t>(parse_number(key, value));
        } else if (key == "top_n") {
            config.top_n = static_cast<int>(parse_number(key, value));
        } else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
    config.layout.seed = config.seed;
    return config;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open config file: " + path);
    return parse_config(in);
}

Prediction user_cf_predict(const RatingsMatrix& train, const SimilarityGraph& graph,
                           const std::string& user, const std::string& item,
                           bool fallback_enabled) {
    int u = 0;
    int i = 0;
    check_ids(train, user, item, u, i);
    auto p = classic_predict_indexed(train, graph, u, i, CfMethod::ClassicUser, fallback_enabled);
    if (!p) throw InsufficientDataError("no prediction available for " + user + "," + item);
    return *p;
}

Prediction item_cf_predict(const RatingsMatrix& train, const SimilarityGraph& graph,
                           const std::string& user, const std::string& item,
                           bool fallback_enabled) {
    int u = 0;
    int i = 0;
    check_ids(train, user, item, u, i);
    auto p = classic_predict_indexed(train, graph, u, i, CfMethod::ClassicItem, fallback_enabled);
    if (!p) throw InsufficientDataError("no prediction available for " + user + "," + item);
    return *p;
}

KernelCfModel::KernelCfModel(RatingsMatrix train, PipelineConfig config, SimilarityGraph graph,
                             LayoutState layout, BandwidthPair bandwidths)
    : train_(std::move(train)),
      config_(std::move(config)),
      graph_(std::move(graph)),
      layout_(std::move(layout)),
      bandwidths_(std::move(bandwidths)) {}

KernelCfModel KernelCfModel::fit(const RatingsMatrix& train, const PipelineConfig& config) {
    if (train.empty()) throw std::invalid_argument("cannot fit a model on an empty matrix");
    if (config.functional_grid < 1) {
        throw std::invalid_argument("functional_grid must be >= 1");
    }

    SimilarityOptions options;
    options.metric = config.metric;
    options.edge_threshold = config.edge_threshold;
    options.mean_center = config.mean_center;
    options.min_corated = config.min_corated;

    SimilarityGraph graph = build_similarity_graph(train, config.mode, options);
    LayoutState layout = run_layout(graph, config.layout);

    // Smoothing sample over the layout: one point per rated node, response
    // is the node's mean rating.
    const bool user_mode = config.mode == GraphMode::User;
    Sample2D sample;
    for (std::size_t node = 0; node < graph.node_count(); ++node) {
        const auto mean = user_mode ? train.user_mean(static_cast<int>(node))
                                    : train.item_mean(static_cast<int>(node));
        if (!mean) continue;
        sample.points.push_back(layout.positions[node]);
        sample.y.push_back(*mean);
    }

    BandwidthPair bandwidths = [&] {
        FunctionalSet degenerate;
        degenerate.region = detail::resolve_grid(sample, std::nullopt).box;
        if (sample.size() < 6) {
            return bandwidth_2d(degenerate, 0.0, kernel_constants({config.kernel}),
                                std::max<std::size_t>(sample.size(), 1));
        }

        // Central 90% quantile box of the layout sample.
        std::vector<double> ts;
        std::vector<double> us;
        ts.reserve(sample.size());
        us.reserve(sample.size());
        for (const Vec2& p : sample.points) {
            ts.push_back(p.t);
            us.push_back(p.u);
        }
        std::sort(ts.begin(), ts.end());
        std::sort(us.begin(), us.end());
        const auto lo = static_cast<std::size_t>(0.05 * (sample.size() - 1));
        const auto hi = static_cast<std::size_t>(std::ceil(0.95 * (sample.size() - 1)));
        Box2 region{ts[lo], ts[hi], us[lo], us[hi]};

        try {
            const SurfaceFit fit = fit_quadratic_surface(sample);
            const SymMat2 h = reference_rule(sample.points);
            const auto density = [&sample, h](const Vec2& q) { return kde(sample.points, q, h); };
            if (!(region.area() > 0.0)) throw std::invalid_argument("degenerate layout region");
            const FunctionalSet functionals =
                compute_functionals(fit, density, region, config.functional_grid);
            return bandwidth_2d(functionals, fit.residual_variance,
                                kernel_constants({config.kernel}), sample.size());
        } catch (const FitError&) {
        } catch (const std::invalid_argument&) {
        }
        // Collinear or otherwise degenerate layouts use the flagged fallback.
        return bandwidth_2d(degenerate, 0.0, kernel_constants({config.kernel}), sample.size());
    }();

    return KernelCfModel(train, config, std::move(graph), std::move(layout),
                         std::move(bandwidths));
}

double KernelCfModel::window_weight(int center, int neighbor) const {
    if (config_.weight_scheme == WeightScheme::Similarity) {
        const auto sim = graph_.similarity(center, neighbor);
        return sim ? *sim : 0.0;
    }
    const Vec2 d = layout_.positions[neighbor] - layout_.positions[center];
    const KernelSpec spec{config_.kernel};
    return kernel_eval(spec, d.t / bandwidths_.b_t) * kernel_eval(spec, d.u / bandwidths_.b_u);
}

std::vector<int> KernelCfModel::window_neighbors(int node) const {
    std::vector<int> out;
    for (const auto& [k, sim] : graph_.neighbors(node)) {
        if (window_weight(node, k) > 0.0) out.push_back(k);
    }
    return out;
}

std::optional<Prediction> KernelCfModel::predict_indexed(int user, int item,
                                                         bool allow_fallback) const {
    const bool user_mode = config_.mode == GraphMode::User;
    // The window is centered at the node whose neighborhood we filter:
    // the user in user mode, the target item in item mode.
    const int center = user_mode ? user : item;

    std::vector<WeightedRating> terms;
    for (const auto& [k, sim] : graph_.neighbors(center)) {
        const double w = window_weight(center, k);
        if (w <= 0.0) continue;
        const auto r = user_mode ? train_.rating(k, item) : train_.rating(user, k);
        if (r) terms.push_back({w, *r});
    }

    Prediction p;
    p.user_id = train_.user_id(user);
    p.item_id = train_.item_id(item);
    p.method = CfMethod::KernelCf;
    p.neighborhood_size = static_cast<int>(terms.size());
    if (auto score = weighted_mean(terms)) {
        p.score = *score;
        return p;
    }
    p.neighborhood_size = 0;
    if (allow_fallback) {
        if (auto score = fallback_score(train_, item)) {
            p.score = *score;
            p.fallback = true;
            return p;
        }
    }
    return std::nullopt;
}

std::optional<Prediction> KernelCfModel::try_predict(int user, int item) const {
    return predict_indexed(user, item, config_.fallback_enabled);
}

Prediction KernelCfModel::predict(const std::string& user, const std::string& item) const {
    int u = 0;
    int i = 0;
    check_ids(train_, user, item, u, i);
    auto p = predict_indexed(u, i, config_.fallback_enabled);
    if (!p) throw InsufficientDataError("no prediction available for " + user + "," + item);
    return *p;
}

std::vector<Prediction> KernelCfModel::recommend(const std::string& user, int top_n) const {
    if (top_n < 1) throw std::invalid_argument("top_n must be >= 1");
    const int u = train_.user_index(user);
    if (u < 0) throw LookupError("unknown user id: " + user);

    const bool user_mode = config_.mode == GraphMode::User;
    const auto& rated = train_.user_profile(u);

    // Candidate items come from the classic positive-similarity stage:
    // items the user's neighbors rated (user mode) or items adjacent to the
    // user's rated items (item mode), minus the user's own history.
    std::vector<bool> candidate(train_.item_count(), false);
    if (user_mode) {
        for (const auto& [k, sim] : graph_.neighbors(u)) {
            for (const auto& [item, value] : train_.user_profile(k)) candidate[item] = true;
        }
    } else {
        for (const auto& [item, value] : rated) {
            for (const auto& [k, sim] : graph_.neighbors(item)) candidate[k] = true;
        }
    }
    for (const auto& [item, value] : rated) candidate[item] = false;

    std::vector<Prediction> scored;
    for (std::size_t item = 0; item < candidate.size(); ++item) {
        if (!candidate[item]) continue;
        // Candidates outside every window carry no signal; skip them
        // rather than fall back.
        if (auto p = predict_indexed(u, static_cast<int>(item), false)) {
            scored.push_back(std::move(*p));
        }
    }

    std::sort(scored.begin(), scored.end(), [&](const Prediction& a, const Prediction& b) {
        if (a.score != b.score) return a.score > b.score;
        return train_.item_index(a.item_id) < train_.item_index(b.item_id);
    });
    if (static_cast<int>(scored.size()) > top_n) scored.resize(top_n);
    return scored;
}

std::vector<Prediction> kernel_cf_recommend(const RatingsMatrix& train,
                                            const PipelineConfig& config,
                                            const std::string& user, int top_n) {
    return KernelCfModel::fit(train, config).recommend(user, top_n);
}

std::string method_name(CfMethod method) {
    switch (method) {
        case CfMethod::ClassicUser:
            return "classic-user";
        case CfMethod::ClassicItem:
            return "classic-item";
        case CfMethod::KernelCf:
            return "kernel-cf";
    }
    return "unknown";
}

EvalReport evaluate(const DatasetSplit& split, CfMethod method, const PipelineConfig& config) {
    if (split.test.empty()) throw std::invalid_argument("test set is empty");

    const RatingsMatrix& train = split.train;

    std::optional<SimilarityGraph> classic_graph;
    std::optional<KernelCfModel> model;
    if (method == CfMethod::KernelCf) {
        model = KernelCfModel::fit(train, config);
    } else {
        SimilarityOptions options;
        options.metric = config.metric;
        options.edge_threshold = config.edge_threshold;
        options.mean_center = config.mean_center;
        options.min_corated = config.min_corated;
        classic_graph = build_similarity_graph(
            train, method == CfMethod::ClassicUser ? GraphMode::User : GraphMode::Item, options);
    }

    MethodStats stats;
    stats.method = method_name(method);
    double sq_sum = 0.0;
    double abs_sum = 0.0;
    std::size_t fallbacks = 0;

    for (std::size_t u = 0; u < split.test.user_count(); ++u) {
        for (const auto& [item, truth] : split.test.user_profile(static_cast<int>(u))) {
            ++stats.tested;
            std::optional<Prediction> p;
            if (model) {
                p = model->try_predict(static_cast<int>(u), item);
            } else {
                p = classic_predict_indexed(train, *classic_graph, static_cast<int>(u), item,
                                            method, config.fallback_enabled);
            }
            if (!p) continue;
            ++stats.predicted;
            if (p->fallback) ++fallbacks;
            const double err = p->score - truth;
            sq_sum += err * err;
            abs_sum += std::abs(err);
        }
    }

    if (stats.predicted > 0) {
        stats.rmse = std::sqrt(sq_sum / static_cast<double>(stats.predicted));
        stats.mae = abs_sum / static_cast<double>(stats.predicted);
        stats.fallback_rate = static_cast<double>(fallbacks) / static_cast<double>(stats.predicted);
    }
    stats.coverage =
        stats.tested > 0 ? static_cast<double>(stats.predicted) / static_cast<double>(stats.tested)
                         : 0.0;

    EvalReport report;
    report.seed = split.seed;
    report.holdout = split.holdout_fraction;
    report.methods.push_back(stats);
    return report;
}

EvalReport evaluate_all(const DatasetSplit& split, const PipelineConfig& config) {
    EvalReport report;
    report.seed = split.seed;
    report.holdout = split.holdout_fraction;
    for (CfMethod method : {CfMethod::ClassicUser, CfMethod::ClassicItem, CfMethod::KernelCf}) {
        EvalReport one = evaluate(split, method, config);
        report.methods.push_back(one.methods.front());
    }
    return report;
}

std::string format_report(const EvalReport& report) {
    std::ostringstream out;
    out << "seed = " << report.seed << '\n';
    out << "holdout = " << format_double(report.holdout) << '\n';
    out << "methods = ";
    for (std::size_t i = 0; i < report.methods.size(); ++i) {
        if (i) out << ',';
        out << report.methods[i].method;
    }
    out << '\n';
    for (const MethodStats& m : report.methods) {
        out << m.method << ".rmse = " << format_double(m.rmse) << '\n';
        out << m.method << ".mae = " << format_double(m.mae) << '\n';
        out << m.method << ".coverage = " << format_double(m.coverage) << '\n';
        out << m.method << ".fallback_rate = " << format_double(m.fallback_rate) << '\n';
        out << m.method << ".predicted = " << m.predicted << '\n';
        out << m.method << ".tested = " << m.tested << '\n';
    }
    return out.str();
}

void write_report(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write report file: " + path);
    out << format_report(report);
}

}  // namespace kernelcf
