"""Smoke tests for the python bindings."""

import math

import pytest

try:
    import kernelcf as kcf
except ImportError:
    import _kernelcf as kcf


def two_block_matrix():
    m = kcf.RatingsMatrix()
    for u in range(12):
        for i in range(10):
            same_block = (u < 6) == (i < 5)
            value = 4.5 if same_block else 1.5
            if (u + i) % 3 == 0:
                continue
            m.add(f"u{u}", f"i{i}", value)
    return m


def test_cosine_similarity_hand_value():
    assert kcf.cosine_similarity({0: 3.0, 1: 4.0}, {0: 4.0, 1: 3.0}) == pytest.approx(0.96)
    with pytest.raises(kcf.UndefinedSimilarityError):
        kcf.cosine_similarity({}, {0: 1.0})


def test_jaccard_and_distance():
    assert kcf.jaccard_similarity({1: 1.0, 2: 1.0}, {2: 1.0, 3: 1.0}) == pytest.approx(1 / 3)
    assert kcf.similarity_to_distance(0.5) == pytest.approx(2.0)
    with pytest.raises(kcf.NoDistanceError):
        kcf.similarity_to_distance(-1.0)


def test_kernel_constants_closed_forms():
    spec = kcf.KernelSpec(kcf.KernelFamily.EPANECHNIKOV)
    constants = kcf.kernel_constants(spec)
    assert constants.roughness == pytest.approx(0.6, abs=1e-8)
    assert constants.second_moment == pytest.approx(0.2, abs=1e-8)
    assert kcf.kernel_eval(spec, 0.0) == pytest.approx(0.75)


def test_kde_peak():
    h = kcf.SymMat2(1.0, 0.0, 1.0)
    assert kcf.kde([(0.0, 0.0)], (0.0, 0.0), h) == pytest.approx(1.0 / (2.0 * math.pi))


def test_nw_estimators():
    sample = kcf.Sample1D([-1.0, 1.0], [2.0, 4.0])
    spec = kcf.KernelSpec(kcf.KernelFamily.GAUSSIAN)
    assert kcf.nw_estimate_1d(sample, 0.0, 1.0, spec).value == pytest.approx(3.0)

    flat = kcf.Sample2D([(-1, -1), (1, -1), (-1, 1), (1, 1)], [1.0, 2.0, 3.0, 4.0])
    assert kcf.nw_estimate_2d(flat, (0.0, 0.0), 1.0, 1.0, spec).value == pytest.approx(2.5)


def test_split_partition():
    m = two_block_matrix()
    s = kcf.split(m, 0.25, 7)
    assert s.train.entry_count + s.test.entry_count == m.entry_count
    again = kcf.split(m, 0.25, 7)
    assert [(r.user_id, r.item_id, r.value) for r in s.test.entries()] == [
        (r.user_id, r.item_id, r.value) for r in again.test.entries()
    ]


def test_layout_runs_and_exports(tmp_path):
    m = two_block_matrix()
    graph = kcf.build_similarity_graph(m, kcf.GraphMode.USER)
    config = kcf.LayoutConfig()
    config.seed = 5
    config.max_iterations = 200
    state = kcf.run_layout(graph, config)
    assert len(state.positions) == graph.node_count
    path = tmp_path / "layout.csv"
    kcf.export_layout(state, graph.node_ids(), str(path))
    back = kcf.import_layout(str(path))
    assert [p for _, p in back] == state.positions


def test_pipeline_fit_predict_recommend():
    m = two_block_matrix()
    config = kcf.PipelineConfig()
    config.seed = 3
    config.layout.seed = 3
    config.layout.max_iterations = 300
    model = kcf.KernelCfModel.fit(m, config)
    assert model.bandwidths.b_t > 0.0
    p = model.predict("u0", "i9")
    assert m.min_rating() - 1e-9 <= p.score <= m.max_rating() + 1e-9
    recs = model.recommend("u0", 3)
    assert len(recs) <= 3
    assert all(r.score >= recs[-1].score for r in recs)

    with pytest.raises(kcf.UnknownIdError):
        model.predict("ghost", "i0")


def test_evaluate_reports_all_methods():
    m = two_block_matrix()
    config = kcf.PipelineConfig()
    config.seed = 11
    config.layout.seed = 11
    config.layout.max_iterations = 300
    s = kcf.split(m, 0.2, 11)
    report = kcf.evaluate_all(s, config)
    names = [stats.method for stats in report.methods]
    assert names == ["classic-user", "classic-item", "kernel-cf"]
    for stats in report.methods:
        assert stats.mae <= stats.rmse + 1e-12
    text = kcf.format_report(report)
    assert "kernel-cf.rmse = " in text
