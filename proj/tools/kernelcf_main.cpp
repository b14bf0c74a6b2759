// kernelcf command line: ingest, layout, predict, recommend, evaluate,
// diagnose. Every subcommand accepts --config, --seed and --output.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "kernelcf/bandwidth.hpp"
#include "kernelcf/errors.hpp"
#include "kernelcf/layout.hpp"
#include "kernelcf/pipeline.hpp"
#include "kernelcf/ratings.hpp"
#include "kernelcf/similarity.hpp"

namespace {

using namespace kernelcf;

struct CommonArgs {
    std::string ratings_path;
    std::string config_path;
    std::string output_path;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--ratings", args.ratings_path, "Ratings file (user,item,rating triples)")
        ->required();
    cmd->add_option("--config", args.config_path, "Pipeline config file (key = value lines)");
    cmd->add_option("--seed", args.seed, "Seed overriding the config value");
    cmd->add_option("--output", args.output_path, "Output path (default: stdout)");
}

PipelineConfig resolve_config(const CommonArgs& args) {
    PipelineConfig config;
    if (!args.config_path.empty()) config = load_config(args.config_path);
    if (args.seed) {
        config.seed = *args.seed;
        config.layout.seed = *args.seed;
    }
    return config;
}

SimilarityOptions similarity_options(const PipelineConfig& config) {
    SimilarityOptions options;
    options.metric = config.metric;
    options.edge_threshold = config.edge_threshold;
    options.mean_center = config.mean_center;
    options.min_corated = config.min_corated;
    return options;
}

RatingsMatrix load_with_warnings(const std::string& path) {
    IngestStats stats;
    RatingsMatrix matrix = load_ratings(path, &stats);
    for (const std::string& err : stats.line_errors) std::cerr << "warning: " << err << '\n';
    if (stats.duplicates > 0) {
        std::cerr << "warning: " << stats.duplicates
                  << " duplicate pair(s) resolved last-write-wins\n";
    }
    return matrix;
}

// Writes through a file when --output was given, stdout otherwise.
void emit(const CommonArgs& args, const std::string& text) {
    if (args.output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(args.output_path);
    if (!out) throw IngestError("cannot write output file: " + args.output_path);
    out << text;
}

CfMethod parse_method(const std::string& name) {
    if (name == "classic-user") return CfMethod::ClassicUser;
    if (name == "classic-item") return CfMethod::ClassicItem;
    if (name == "kernel-cf") return CfMethod::KernelCf;
    throw std::invalid_argument("unknown method: " + name);
}

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

int run_ingest(const CommonArgs& args, double holdout, const std::string& train_out,
               const std::string& test_out) {
    IngestStats stats;
    const RatingsMatrix matrix = load_ratings(args.ratings_path, &stats);
    for (const std::string& err : stats.line_errors) std::cerr << "warning: " << err << '\n';

    std::ostringstream summary;
    summary << "users = " << matrix.user_count() << '\n';
    summary << "items = " << matrix.item_count() << '\n';
    summary << "entries = " << matrix.entry_count() << '\n';
    summary << "duplicates = " << stats.duplicates << '\n';
    summary << "skipped = " << stats.skipped << '\n';

    if (holdout > 0.0) {
        const PipelineConfig config = resolve_config(args);
        const DatasetSplit s = split(matrix, holdout, config.seed);
        if (!train_out.empty()) save_ratings(s.train, train_out);
        if (!test_out.empty()) save_ratings(s.test, test_out);
        summary << "train_entries = " << s.train.entry_count() << '\n';
        summary << "test_entries = " << s.test.entry_count() << '\n';
    }

    if (!args.output_path.empty()) save_ratings(matrix, args.output_path);
    std::cout << summary.str();
    return 0;
}

int run_layout_cmd(const CommonArgs& args, std::optional<int> iterations,
                   const std::string& trace_path, const std::string& edges_path) {
    PipelineConfig config = resolve_config(args);
    if (iterations) config.layout.max_iterations = *iterations;

    const RatingsMatrix matrix = load_with_warnings(args.ratings_path);
    const SimilarityGraph graph =
        build_similarity_graph(matrix, config.mode, similarity_options(config));
    const LayoutState state = run_layout(graph, config.layout);

    std::ostringstream out;
    write_layout(state, graph.node_ids(), out);
    emit(args, out.str());
    if (!trace_path.empty()) export_energy_trace(state, trace_path);
    if (!edges_path.empty()) export_edge_list(graph, edges_path);
    std::cerr << "layout: " << graph.node_count() << " nodes, " << graph.edge_count()
              << " edges, " << (state.converged ? "converged" : "not converged") << " after "
              << state.iteration << " iteration(s)\n";
    return 0;
}

int run_predict(const CommonArgs& args, const std::string& user, const std::string& item,
                const std::string& method_name) {
    const PipelineConfig config = resolve_config(args);
    const RatingsMatrix matrix = load_with_warnings(args.ratings_path);
    const CfMethod method = parse_method(method_name);

    Prediction p;
    if (method == CfMethod::KernelCf) {
        p = KernelCfModel::fit(matrix, config).predict(user, item);
    } else {
        const GraphMode mode =
            method == CfMethod::ClassicUser ? GraphMode::User : GraphMode::Item;
        const SimilarityGraph graph =
            build_similarity_graph(matrix, mode, similarity_options(config));
        p = method == CfMethod::ClassicUser
                ? user_cf_predict(matrix, graph, user, item, config.fallback_enabled)
                : item_cf_predict(matrix, graph, user, item, config.fallback_enabled);
    }

    std::ostringstream out;
    out << "user = " << p.user_id << '\n';
    out << "item = " << p.item_id << '\n';
    out << "score = " << format_double(p.score) << '\n';
    out << "method = " << method_name << '\n';
    out << "neighborhood_size = " << p.neighborhood_size << '\n';
    out << "fallback = " << (p.fallback ? "true" : "false") << '\n';
    emit(args, out.str());
    return 0;
}

int run_recommend(const CommonArgs& args, const std::string& user, int top_n) {
    const PipelineConfig config = resolve_config(args);
    const RatingsMatrix matrix = load_with_warnings(args.ratings_path);
    const auto recs = kernel_cf_recommend(matrix, config, user, top_n);
    if (recs.empty()) std::cerr << "warning: no scorable candidates for user " << user << '\n';

    std::ostringstream out;
    out << "rank,item_id,score\n";
    for (std::size_t i = 0; i < recs.size(); ++i) {
        out << (i + 1) << ',' << recs[i].item_id << ',' << format_double(recs[i].score) << '\n';
    }
    emit(args, out.str());
    return 0;
}

int run_evaluate(const CommonArgs& args, const std::string& method_name,
                 std::optional<double> holdout) {
    PipelineConfig config = resolve_config(args);
    if (holdout) config.holdout = *holdout;

    const RatingsMatrix matrix = load_with_warnings(args.ratings_path);
    const DatasetSplit s = split(matrix, config.holdout, config.seed);
    const EvalReport report = method_name == "all"
                                  ? evaluate_all(s, config)
                                  : evaluate(s, parse_method(method_name), config);
    emit(args, format_report(report));
    return 0;
}

int run_diagnose(const CommonArgs& args) {
    const PipelineConfig config = resolve_config(args);
    const RatingsMatrix matrix = load_with_warnings(args.ratings_path);
    const KernelCfModel model = KernelCfModel::fit(matrix, config);

    std::ostringstream out;
    out << "nodes = " << model.graph().node_count() << '\n';
    out << "edges = " << model.graph().edge_count() << '\n';
    out << "isolated = " << model.graph().isolated_count() << '\n';
    out << "layout_iterations = " << model.layout().iteration << '\n';
    out << "layout_converged = " << (model.layout().converged ? "true" : "false") << '\n';
    write_bandwidth_diagnostics(model.bandwidths(), out);
    emit(args, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel-CF: collaborative filtering as kernel regression over a "
                 "force-directed layout"};
    app.require_subcommand(1);

    CommonArgs ingest_args;
    double ingest_holdout = 0.0;
    std::string train_out;
    std::string test_out;
    auto* ingest = app.add_subcommand("ingest", "Load, validate and re-export ratings");
    add_common(ingest, ingest_args);
    ingest->add_option("--holdout", ingest_holdout, "Also split with this holdout fraction");
    ingest->add_option("--train-out", train_out, "Path for the train manifest");
    ingest->add_option("--test-out", test_out, "Path for the test manifest");

    CommonArgs layout_args;
    std::optional<int> layout_iterations;
    std::string trace_path;
    std::string edges_path;
    auto* layout = app.add_subcommand("layout", "Embed the similarity graph in 2-D");
    add_common(layout, layout_args);
    layout->add_option("--iterations", layout_iterations, "Override max layout iterations");
    layout->add_option("--energy-trace", trace_path, "Write per-iteration energies here");
    layout->add_option("--edges", edges_path, "Write the similarity edge list here");

    CommonArgs predict_args;
    std::string predict_user;
    std::string predict_item;
    std::string predict_method = "kernel-cf";
    auto* predict = app.add_subcommand("predict", "Predict one user-item rating");
    add_common(predict, predict_args);
    predict->add_option("--user", predict_user, "User id")->required();
    predict->add_option("--item", predict_item, "Item id")->required();
    predict->add_option("--method", predict_method,
                        "classic-user | classic-item | kernel-cf (default)");

    CommonArgs recommend_args;
    std::string recommend_user;
    int top_n = 10;
    auto* recommend = app.add_subcommand("recommend", "Top-N Kernel-CF recommendations");
    add_common(recommend, recommend_args);
    recommend->add_option("--user", recommend_user, "User id")->required();
    recommend->add_option("--top-n", top_n, "Number of items to return");

    CommonArgs evaluate_args;
    std::string evaluate_method = "all";
    std::optional<double> evaluate_holdout;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Hold-out evaluation (RMSE/MAE)");
    add_common(evaluate_cmd, evaluate_args);
    evaluate_cmd->add_option("--method", evaluate_method,
                             "classic-user | classic-item | kernel-cf | all");
    evaluate_cmd->add_option("--holdout", evaluate_holdout, "Held-out fraction of ratings");

    CommonArgs diagnose_args;
    auto* diagnose = app.add_subcommand("diagnose", "Dump bandwidth and layout diagnostics");
    add_common(diagnose, diagnose_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n' << app.help();
        return 2;
    }

    try {
        if (ingest->parsed()) return run_ingest(ingest_args, ingest_holdout, train_out, test_out);
        if (layout->parsed())
            return run_layout_cmd(layout_args, layout_iterations, trace_path, edges_path);
        if (predict->parsed())
            return run_predict(predict_args, predict_user, predict_item, predict_method);
        if (recommend->parsed()) return run_recommend(recommend_args, recommend_user, top_n);
        if (evaluate_cmd->parsed())
            return run_evaluate(evaluate_args, evaluate_method, evaluate_holdout);
        if (diagnose->parsed()) return run_diagnose(diagnose_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
