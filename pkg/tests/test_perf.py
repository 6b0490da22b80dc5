from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from procperf.errors import ValidationError
from procperf.perf import (
    ScalingSeries,
    TimingRecord,
    TradeoffPoint,
    dominates,
    epoch_stats,
    pareto_front,
    scaling_efficiency,
    speedup_series,
    total_training_time,
)

from .oracles import exhaustive_front

# Nine C2D models at g=64: (time per epoch, auc_norm)
C2D_G64 = {
    "ResNet50": (335.4, 0.911),
    "Inception-ResNet-v2": (413.5, 0.919),
    "MobileNet-v2": (460.7, 0.915),
    "DenseNet201": (478.9, 0.915),
    "Inception-v3": (493.0, 0.915),
    "Xception": (502.1, 0.919),
    "VGG19": (580.8, 0.891),
    "MobileNet": (642.5, 0.908),
    "DenseNet169": (666.6, 0.917),
}


def test_epoch_stats_singleton():
    out = epoch_stats([TimingRecord("m", 2, 0, 100.0)])
    assert out["m"].points == {2: 100.0}


def test_epoch_stats_mean():
    recs = [TimingRecord("m", 4, e, s) for e, s in enumerate([100.0, 110.0, 90.0])]
    assert epoch_stats(recs)["m"].points == {4: 100.0}


def test_epoch_stats_exclude_warmup():
    recs = [TimingRecord("m", 4, e, s) for e, s in enumerate([500.0, 100.0, 100.0])]
    assert epoch_stats(recs, exclude_first=1)["m"].points == {4: 100.0}


def test_epoch_stats_empty_group_names_model_and_g():
    recs = [TimingRecord("m", 8, 0, 100.0)]
    with pytest.raises(ValidationError, match=r"'m'.*g=8"):
        epoch_stats(recs, exclude_first=1)


def test_epoch_stats_groups_models_sorted():
    recs = [TimingRecord("z", 2, 0, 5.0), TimingRecord("a", 2, 0, 7.0), TimingRecord("a", 4, 0, 3.0)]
    out = epoch_stats(recs)
    assert list(out) == ["a", "z"]
    assert out["a"].points == {2: 7.0, 4: 3.0}


@pytest.mark.parametrize("bad", [dict(gpus=0), dict(seconds=0.0), dict(seconds=-1.0), dict(epoch=-1)])
def test_timing_record_validation(bad):
    args = dict(model_id="m", gpus=2, epoch=0, seconds=1.0) | bad
    with pytest.raises(ValidationError):
        TimingRecord(**args)


@pytest.mark.parametrize(
    "seconds,epochs,hours",
    [(335.4, 65, 6.06), (413.5, 65, 7.47), (460.7, 65, 8.32)],
)
def test_total_training_time_reported_hours(seconds, epochs, hours):
    assert abs(round(total_training_time(seconds, epochs), 2) - hours) <= 0.005


def test_total_training_time_trivial_and_errors():
    assert total_training_time(3600, 1) == 1.0
    for bad in [(0, 1), (-5, 3), (10, 0)]:
        with pytest.raises(ValueError):
            total_training_time(*bad)


def test_total_training_time_linear():
    assert total_training_time(200.0, 10) == pytest.approx(2 * total_training_time(100.0, 10))
    assert total_training_time(100.0, 30) == pytest.approx(3 * total_training_time(100.0, 10))


def test_speedup_resnet50():
    s = ScalingSeries("R50", {2: 15261.6, 64: 335.4})
    sp = speedup_series(s, 2)
    assert sp[2] == 1.0
    assert sp[64] == 15261.6 / 335.4
    assert round(sp[64], 2) == 45.50
    eff = scaling_efficiency(s, 2)
    assert round(eff[64], 2) == 1.42  # super-linear, left unclamped


def test_speedup_constant_and_halving():
    assert speedup_series(ScalingSeries("m", {2: 7.0, 4: 7.0}), 2) == {2: 1.0, 4: 1.0}
    halving = ScalingSeries("m", {1: 1000.0, 2: 500.0, 4: 250.0})
    assert speedup_series(halving, 1) == {1: 1.0, 2: 2.0, 4: 4.0}
    assert scaling_efficiency(halving, 1) == {1: 1.0, 2: 1.0, 4: 1.0}


def test_efficiency_no_gain():
    assert scaling_efficiency(ScalingSeries("m", {1: 100.0, 2: 100.0}), 1)[2] == 0.5


def test_missing_baseline():
    with pytest.raises(ValidationError, match="'m'"):
        speedup_series(ScalingSeries("m", {4: 1.0}), 2)
    with pytest.raises(ValidationError):
        scaling_efficiency(ScalingSeries("m", {4: 1.0}), 2)


@settings(max_examples=100, deadline=None)
@given(
    st.dictionaries(st.sampled_from([1, 2, 4, 8, 16, 32, 64]), st.floats(0.1, 1e5), min_size=1),
    st.floats(0.01, 100.0),
)
def test_speedup_scale_invariance(points, c):
    base = min(points)
    s1 = ScalingSeries("m", points)
    s2 = ScalingSeries("m", {g: t * c for g, t in points.items()})
    assert speedup_series(s1, base)[base] == 1.0
    assert scaling_efficiency(s1, base)[base] == 1.0
    for g in points:
        assert speedup_series(s2, base)[g] == pytest.approx(speedup_series(s1, base)[g], rel=1e-12)
        assert scaling_efficiency(s2, base)[g] == pytest.approx(scaling_efficiency(s1, base)[g], rel=1e-12)


# --- Pareto ------------------------------------------------------------------


def _pts(d):
    return [TradeoffPoint(m, t, a) for m, (t, a) in d.items()]


def test_pareto_single_and_strict():
    p = TradeoffPoint("a", 100, 0.9)
    assert pareto_front([p]) == [p]
    q = TradeoffPoint("b", 200, 0.8)
    assert pareto_front([q, p]) == [p]


def test_pareto_c2d_table():
    pts = _pts(C2D_G64)
    front = pareto_front(pts)
    assert [p.model_id for p in front] == ["ResNet50", "Inception-ResNet-v2"]
    oracle = exhaustive_front([(p.time_per_epoch, p.auc_norm) for p in pts])
    assert sorted(oracle) == [(p.time_per_epoch, p.auc_norm) for p in front]


def test_pareto_coincident_points_kept():
    a, b = TradeoffPoint("a", 10, 0.5), TradeoffPoint("b", 10, 0.5)
    assert pareto_front([a, b]) == [a, b]
    # a coincident pair that is dominated is dropped together
    c = TradeoffPoint("c", 5, 0.6)
    assert pareto_front([a, b, c]) == [c]


def test_pareto_equal_accuracy_slower_excluded():
    x = TradeoffPoint("x", 502.1, 0.919)
    irv2 = TradeoffPoint("irv2", 413.5, 0.919)
    assert dominates(irv2, x) and not dominates(x, irv2)
    assert pareto_front([x, irv2]) == [irv2]


def test_tradeoff_point_validation():
    with pytest.raises(ValidationError):
        TradeoffPoint("m", 0.0, 0.5)
    with pytest.raises(ValidationError):
        TradeoffPoint("m", 1.0, 1.0)


point_lists = st.lists(
    st.builds(
        TradeoffPoint,
        st.sampled_from("abcdef"),
        st.sampled_from([1.0, 2.0, 3.0, 5.0, 8.0]),
        st.sampled_from([0.1, 0.4, 0.5, 0.7, 0.9]),
    ),
    min_size=1,
    max_size=12,
)


@settings(max_examples=300, deadline=None)
@given(point_lists)
def test_pareto_sound_and_complete(points):
    front = pareto_front(points)
    front_ids = {id(p) for p in front}
    for p in front:
        assert not any(dominates(q, p) for q in points)
    for p in points:
        if id(p) not in front_ids:
            assert any(dominates(q, p) for q in front)
    assert [p.time_per_epoch for p in front] == sorted(p.time_per_epoch for p in front)
    assert sorted((p.time_per_epoch, p.auc_norm) for p in front) == sorted(
        exhaustive_front([(p.time_per_epoch, p.auc_norm) for p in points])
    )


@settings(max_examples=200, deadline=None)
@given(point_lists, st.builds(TradeoffPoint, st.just("new"), st.floats(0.5, 9.0), st.floats(0.05, 0.95)))
def test_pareto_monotone_under_insertion(points, new):
    before = pareto_front(points)
    after_ids = {id(p) for p in pareto_front(points + [new])}
    for p in before:
        if id(p) not in after_ids:
            assert dominates(new, p)
