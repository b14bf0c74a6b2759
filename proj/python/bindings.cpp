// Python bindings for the Kernel-CF core: ratings, similarity graphs, the
// force-directed layout, kernel smoothing, plug-in bandwidths and the
// prediction pipeline.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kernelcf/bandwidth.hpp"
#include "kernelcf/errors.hpp"
#include "kernelcf/kernels.hpp"
#include "kernelcf/layout.hpp"
#include "kernelcf/pipeline.hpp"
#include "kernelcf/ratings.hpp"
#include "kernelcf/similarity.hpp"

namespace py = pybind11;
using namespace kernelcf;

namespace {

Sample1D make_sample_1d(std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("x and y must have the same length");
    return {std::move(x), std::move(y)};
}

Sample2D make_sample_2d(const std::vector<std::pair<double, double>>& points,
                        std::vector<double> y) {
    if (points.size() != y.size()) {
        throw std::invalid_argument("points and y must have the same length");
    }
    Sample2D out;
    out.points.reserve(points.size());
    for (const auto& [t, u] : points) out.points.push_back({t, u});
    out.y = std::move(y);
    return out;
}

std::vector<Vec2> make_points(const std::vector<std::pair<double, double>>& points) {
    std::vector<Vec2> out;
    out.reserve(points.size());
    for (const auto& [t, u] : points) out.push_back({t, u});
    return out;
}

}  // namespace

PYBIND11_MODULE(_kernelcf, m) {
    m.doc() = "Kernel-CF: collaborative filtering as Nadaraya-Watson kernel regression "
              "over a ForceAtlas2 layout of the similarity graph";

    py::register_exception<IngestError>(m, "IngestError");
    py::register_exception<LookupError>(m, "UnknownIdError");
    py::register_exception<UndefinedSimilarityError>(m, "UndefinedSimilarityError");
    py::register_exception<NoDistanceError>(m, "NoDistanceError");
    py::register_exception<InsufficientDataError>(m, "InsufficientDataError");
    py::register_exception<FitError>(m, "FitError");

    // ratings
    py::class_<Rating>(m, "Rating")
        .def_readonly("user_id", &Rating::user_id)
        .def_readonly("item_id", &Rating::item_id)
        .def_readonly("value", &Rating::value);

    py::class_<RatingsMatrix>(m, "RatingsMatrix")
        .def(py::init<>())
        .def("add", &RatingsMatrix::add, py::arg("user_id"), py::arg("item_id"),
             py::arg("value"))
        .def_property_readonly("user_count", &RatingsMatrix::user_count)
        .def_property_readonly("item_count", &RatingsMatrix::item_count)
        .def_property_readonly("entry_count", &RatingsMatrix::entry_count)
        .def("users", &RatingsMatrix::users)
        .def("items", &RatingsMatrix::items)
        .def("user_index", &RatingsMatrix::user_index)
        .def("item_index", &RatingsMatrix::item_index)
        .def("rating", &RatingsMatrix::rating, py::arg("user"), py::arg("item"))
        .def("entries", &RatingsMatrix::entries)
        .def("global_mean", &RatingsMatrix::global_mean)
        .def("item_mean", &RatingsMatrix::item_mean)
        .def("user_mean", &RatingsMatrix::user_mean)
        .def("min_rating", &RatingsMatrix::min_rating)
        .def("max_rating", &RatingsMatrix::max_rating);

    py::class_<IngestStats>(m, "IngestStats")
        .def_readonly("lines_read", &IngestStats::lines_read)
        .def_readonly("parsed", &IngestStats::parsed)
        .def_readonly("duplicates", &IngestStats::duplicates)
        .def_readonly("skipped", &IngestStats::skipped)
        .def_readonly("header_skipped", &IngestStats::header_skipped)
        .def_readonly("line_errors", &IngestStats::line_errors);

    m.def(
        "load_ratings",
        [](const std::string& path) {
            IngestStats stats;
            RatingsMatrix matrix = load_ratings(path, &stats);
            return py::make_tuple(std::move(matrix), stats);
        },
        py::arg("path"), "Returns (matrix, ingest_stats)");
    m.def("save_ratings", &save_ratings, py::arg("matrix"), py::arg("path"));

    py::class_<DatasetSplit>(m, "DatasetSplit")
        .def_readonly("train", &DatasetSplit::train)
        .def_readonly("test", &DatasetSplit::test)
        .def_readonly("seed", &DatasetSplit::seed)
        .def_readonly("holdout_fraction", &DatasetSplit::holdout_fraction);

    m.def("split", &split, py::arg("matrix"), py::arg("holdout_fraction"), py::arg("seed"));

    // similarity
    py::enum_<GraphMode>(m, "GraphMode")
        .value("USER", GraphMode::User)
        .value("ITEM", GraphMode::Item);
    py::enum_<SimilarityMetric>(m, "SimilarityMetric")
        .value("COSINE", SimilarityMetric::Cosine)
        .value("JACCARD", SimilarityMetric::Jaccard);

    py::class_<SimilarityOptions>(m, "SimilarityOptions")
        .def(py::init<>())
        .def_readwrite("metric", &SimilarityOptions::metric)
        .def_readwrite("edge_threshold", &SimilarityOptions::edge_threshold)
        .def_readwrite("mean_center", &SimilarityOptions::mean_center)
        .def_readwrite("min_corated", &SimilarityOptions::min_corated);

    py::class_<SimilarityGraph>(m, "SimilarityGraph")
        .def_property_readonly("mode", &SimilarityGraph::mode)
        .def_property_readonly("node_count", &SimilarityGraph::node_count)
        .def_property_readonly("edge_count", &SimilarityGraph::edge_count)
        .def("node_ids", &SimilarityGraph::node_ids)
        .def("neighbors", &SimilarityGraph::neighbors, py::arg("node"))
        .def("similarity", &SimilarityGraph::similarity, py::arg("a"), py::arg("b"))
        .def("degree", &SimilarityGraph::degree, py::arg("node"))
        .def("isolated_count", &SimilarityGraph::isolated_count);

    m.def(
        "cosine_similarity",
        [](const std::map<int, double>& a, const std::map<int, double>& b) {
            return cosine_similarity(a, b);
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "jaccard_similarity",
        [](const std::map<int, double>& a, const std::map<int, double>& b) {
            return jaccard_similarity(a, b);
        },
        py::arg("a"), py::arg("b"));
    m.def("build_similarity_graph", &build_similarity_graph, py::arg("matrix"), py::arg("mode"),
          py::arg("options") = SimilarityOptions{});
    m.def("similarity_to_distance", &similarity_to_distance, py::arg("sim"),
          py::arg("sim_floor") = 1e-6);
    m.def("export_edge_list", &export_edge_list, py::arg("graph"), py::arg("path"));

    // layout
    py::class_<LayoutConfig>(m, "LayoutConfig")
        .def(py::init<>())
        .def_readwrite("k_r", &LayoutConfig::k_r)
        .def_readwrite("max_iterations", &LayoutConfig::max_iterations)
        .def_readwrite("initial_step", &LayoutConfig::initial_step)
        .def_readwrite("convergence_tolerance", &LayoutConfig::convergence_tolerance)
        .def_readwrite("seed", &LayoutConfig::seed);

    py::class_<LayoutState>(m, "LayoutState")
        .def_property_readonly("positions",
                               [](const LayoutState& s) {
                                   std::vector<std::pair<double, double>> out;
                                   out.reserve(s.positions.size());
                                   for (const Vec2& p : s.positions) out.emplace_back(p.t, p.u);
                                   return out;
                               })
        .def_readonly("iteration", &LayoutState::iteration)
        .def_readonly("converged", &LayoutState::converged)
        .def_readonly("energy_trace", &LayoutState::energy_trace);

    m.def(
        "attraction_force",
        [](std::pair<double, double> p1, std::pair<double, double> p2) {
            const Vec2 f = attraction_force({p1.first, p1.second}, {p2.first, p2.second});
            return std::make_pair(f.t, f.u);
        },
        py::arg("p1"), py::arg("p2"));
    m.def(
        "repulsion_force",
        [](std::pair<double, double> p1, std::pair<double, double> p2, int deg1, int deg2,
           double k_r) {
            const Vec2 f =
                repulsion_force({p1.first, p1.second}, {p2.first, p2.second}, deg1, deg2, k_r);
            return std::make_pair(f.t, f.u);
        },
        py::arg("p1"), py::arg("p2"), py::arg("deg1"), py::arg("deg2"), py::arg("k_r"));
    m.def("run_layout", &run_layout, py::arg("graph"), py::arg("config") = LayoutConfig{});
    m.def(
        "export_layout",
        [](const LayoutState& state, const std::vector<std::string>& ids,
           const std::string& path) { export_layout(state, ids, path); },
        py::arg("state"), py::arg("node_ids"), py::arg("path"));
    m.def(
        "import_layout",
        [](const std::string& path) {
            std::vector<std::pair<std::string, std::pair<double, double>>> out;
            for (const auto& [id, p] : import_layout(path)) {
                out.emplace_back(id, std::make_pair(p.t, p.u));
            }
            return out;
        },
        py::arg("path"));

    // kernels
    py::enum_<KernelFamily>(m, "KernelFamily")
        .value("EPANECHNIKOV", KernelFamily::Epanechnikov)
        .value("GAUSSIAN", KernelFamily::Gaussian)
        .value("UNIFORM", KernelFamily::Uniform);

    py::class_<KernelSpec>(m, "KernelSpec")
        .def(py::init<>())
        .def(py::init([](KernelFamily family) { return KernelSpec{family}; }),
             py::arg("family"))
        .def_readwrite("family", &KernelSpec::family)
        .def("compact_support", &KernelSpec::compact_support);

    py::class_<KernelConstants>(m, "KernelConstants")
        .def_readonly("roughness", &KernelConstants::roughness)
        .def_readonly("second_moment", &KernelConstants::second_moment)
        .def_readonly("squared_second_moment", &KernelConstants::squared_second_moment);

    m.def("kernel_eval", &kernel_eval, py::arg("spec"), py::arg("x"));
    m.def("kernel_constants", &kernel_constants, py::arg("spec"));

    py::class_<Sample1D>(m, "Sample1D")
        .def(py::init(&make_sample_1d), py::arg("x"), py::arg("y"))
        .def_readonly("x", &Sample1D::x)
        .def_readonly("y", &Sample1D::y);
    py::class_<Sample2D>(m, "Sample2D")
        .def(py::init(&make_sample_2d), py::arg("points"), py::arg("y"))
        .def_readonly("y", &Sample2D::y);

    py::class_<Estimate>(m, "Estimate")
        .def_readonly("value", &Estimate::value)
        .def_readonly("fallback", &Estimate::fallback);

    m.def("nw_estimate_1d", &nw_estimate_1d, py::arg("sample"), py::arg("x"), py::arg("h"),
          py::arg("spec"));
    m.def(
        "nw_estimate_2d",
        [](const Sample2D& sample, std::pair<double, double> query, double b_t, double b_u,
           const KernelSpec& spec) {
            return nw_estimate_2d(sample, {query.first, query.second}, b_t, b_u, spec);
        },
        py::arg("sample"), py::arg("query"), py::arg("b_t"), py::arg("b_u"), py::arg("spec"));

    py::class_<SymMat2>(m, "SymMat2")
        .def(py::init([](double tt, double tu, double uu) { return SymMat2{tt, tu, uu}; }),
             py::arg("tt"), py::arg("tu"), py::arg("uu"))
        .def_readwrite("tt", &SymMat2::tt)
        .def_readwrite("tu", &SymMat2::tu)
        .def_readwrite("uu", &SymMat2::uu)
        .def("trace", &SymMat2::trace)
        .def("det", &SymMat2::det)
        .def("min_eigenvalue", &SymMat2::min_eigenvalue)
        .def("positive_definite", &SymMat2::positive_definite);

    m.def(
        "kde",
        [](const std::vector<std::pair<double, double>>& points, std::pair<double, double> query,
           const SymMat2& h) { return kde(make_points(points), {query.first, query.second}, h); },
        py::arg("points"), py::arg("query"), py::arg("H"));
    m.def(
        "empirical_covariance",
        [](const std::vector<std::pair<double, double>>& points) {
            return empirical_covariance(make_points(points));
        },
        py::arg("points"));
    m.def(
        "reference_rule",
        [](const std::vector<std::pair<double, double>>& points) {
            return reference_rule(make_points(points));
        },
        py::arg("points"));

    // bandwidth
    py::class_<SurfaceFit>(m, "SurfaceFit")
        .def_readonly("coeff", &SurfaceFit::coeff)
        .def_readonly("coeff_se", &SurfaceFit::coeff_se)
        .def_readonly("residual_variance", &SurfaceFit::residual_variance)
        .def("eval", [](const SurfaceFit& f, std::pair<double, double> p) {
            return f.eval({p.first, p.second});
        })
        .def("second_tt", &SurfaceFit::second_tt)
        .def("second_uu", &SurfaceFit::second_uu);

    m.def("fit_quadratic_surface", &fit_quadratic_surface, py::arg("sample"));

    py::class_<Box2>(m, "Box2")
        .def(py::init([](double t_min, double t_max, double u_min, double u_max) {
                 return Box2{t_min, t_max, u_min, u_max};
             }),
             py::arg("t_min"), py::arg("t_max"), py::arg("u_min"), py::arg("u_max"))
        .def_readwrite("t_min", &Box2::t_min)
        .def_readwrite("t_max", &Box2::t_max)
        .def_readwrite("u_min", &Box2::u_min)
        .def_readwrite("u_max", &Box2::u_max)
        .def("area", &Box2::area);

    py::class_<FunctionalSet>(m, "FunctionalSet")
        .def_readonly("i_tt", &FunctionalSet::i_tt)
        .def_readonly("i_uu", &FunctionalSet::i_uu)
        .def_readonly("i_tu", &FunctionalSet::i_tu)
        .def_readonly("i_f", &FunctionalSet::i_f)
        .def_readonly("i_tt_floor", &FunctionalSet::i_tt_floor)
        .def_readonly("i_uu_floor", &FunctionalSet::i_uu_floor)
        .def_readonly("region", &FunctionalSet::region);

    m.def(
        "compute_functionals",
        [](const SurfaceFit& fit, const std::function<double(std::pair<double, double>)>& density,
           const Box2& region, int grid_resolution) {
            return compute_functionals(
                fit, [&density](const Vec2& p) { return density({p.t, p.u}); }, region,
                grid_resolution);
        },
        py::arg("fit"), py::arg("density"), py::arg("region"), py::arg("grid_resolution"));

    py::class_<BandwidthPair>(m, "BandwidthPair")
        .def_readonly("b_t", &BandwidthPair::b_t)
        .def_readonly("b_u", &BandwidthPair::b_u)
        .def_readonly("fallback", &BandwidthPair::fallback)
        .def_readonly("functionals", &BandwidthPair::functionals)
        .def_readonly("sigma2", &BandwidthPair::sigma2)
        .def_readonly("n", &BandwidthPair::n);

    m.def("bandwidth_2d", &bandwidth_2d, py::arg("functionals"), py::arg("sigma2"),
          py::arg("constants"), py::arg("n"));

    py::class_<Bandwidth1D>(m, "Bandwidth1D")
        .def_readonly("value", &Bandwidth1D::value)
        .def_readonly("fallback", &Bandwidth1D::fallback);

    m.def("bandwidth_1d", &bandwidth_1d, py::arg("sample"), py::arg("spec"),
          py::arg("constants"), py::arg("pilot_h"));
    m.def("estimate_sigma2_1d",
          [](const Sample1D& sample) { return estimate_sigma2(sample); });
    m.def("estimate_sigma2_2d",
          [](const Sample2D& sample) { return estimate_sigma2(sample); });

    // pipeline
    py::enum_<CfMethod>(m, "CfMethod")
        .value("CLASSIC_USER", CfMethod::ClassicUser)
        .value("CLASSIC_ITEM", CfMethod::ClassicItem)
        .value("KERNEL_CF", CfMethod::KernelCf);
    py::enum_<WeightScheme>(m, "WeightScheme")
        .value("KERNEL", WeightScheme::Kernel)
        .value("SIMILARITY", WeightScheme::Similarity);

    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_readwrite("kernel", &PipelineConfig::kernel)
        .def_readwrite("metric", &PipelineConfig::metric)
        .def_readwrite("mode", &PipelineConfig::mode)
        .def_readwrite("edge_threshold", &PipelineConfig::edge_threshold)
        .def_readwrite("mean_center", &PipelineConfig::mean_center)
        .def_readwrite("min_corated", &PipelineConfig::min_corated)
        .def_readwrite("sim_floor", &PipelineConfig::sim_floor)
        .def_readwrite("layout", &PipelineConfig::layout)
        .def_readwrite("functional_grid", &PipelineConfig::functional_grid)
        .def_readwrite("weight_scheme", &PipelineConfig::weight_scheme)
        .def_readwrite("fallback_enabled", &PipelineConfig::fallback_enabled)
        .def_readwrite("holdout", &PipelineConfig::holdout)
        .def_readwrite("seed", &PipelineConfig::seed)
        .def_readwrite("top_n", &PipelineConfig::top_n);

    m.def("load_config", &load_config, py::arg("path"));

    py::class_<Prediction>(m, "Prediction")
        .def_readonly("user_id", &Prediction::user_id)
        .def_readonly("item_id", &Prediction::item_id)
        .def_readonly("score", &Prediction::score)
        .def_readonly("method", &Prediction::method)
        .def_readonly("neighborhood_size", &Prediction::neighborhood_size)
        .def_readonly("fallback", &Prediction::fallback);

    m.def("user_cf_predict", &user_cf_predict, py::arg("train"), py::arg("graph"),
          py::arg("user"), py::arg("item"), py::arg("fallback_enabled") = true);
    m.def("item_cf_predict", &item_cf_predict, py::arg("train"), py::arg("graph"),
          py::arg("user"), py::arg("item"), py::arg("fallback_enabled") = true);

    py::class_<KernelCfModel>(m, "KernelCfModel")
        .def_static("fit", &KernelCfModel::fit, py::arg("train"), py::arg("config"))
        .def("predict", &KernelCfModel::predict, py::arg("user"), py::arg("item"))
        .def("recommend", &KernelCfModel::recommend, py::arg("user"), py::arg("top_n"))
        .def("window_neighbors", &KernelCfModel::window_neighbors, py::arg("node"))
        .def_property_readonly("bandwidths", &KernelCfModel::bandwidths)
        .def_property_readonly("layout", &KernelCfModel::layout)
        .def_property_readonly("graph", &KernelCfModel::graph);

    m.def("kernel_cf_recommend", &kernel_cf_recommend, py::arg("train"), py::arg("config"),
          py::arg("user"), py::arg("top_n"));

    py::class_<MethodStats>(m, "MethodStats")
        .def_readonly("method", &MethodStats::method)
        .def_readonly("rmse", &MethodStats::rmse)
        .def_readonly("mae", &MethodStats::mae)
        .def_readonly("coverage", &MethodStats::coverage)
        .def_readonly("fallback_rate", &MethodStats::fallback_rate)
        .def_readonly("predicted", &MethodStats::predicted)
        .def_readonly("tested", &MethodStats::tested);

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("methods", &EvalReport::methods)
        .def_readonly("seed", &EvalReport::seed)
        .def_readonly("holdout", &EvalReport::holdout);

    m.def("evaluate", &evaluate, py::arg("split"), py::arg("method"), py::arg("config"));
    m.def("evaluate_all", &evaluate_all, py::arg("split"), py::arg("config"));
    m.def("format_report", &format_report, py::arg("report"));
}
