"""Fringe patterns, seeded detection sampling, visibility, and the
operator-facing source summary of the two-slit instrument."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal
from scipy import stats

from obsbox import doubleslit as ds
from obsbox import kernels
from obsbox.errors import ConfigurationError, ContractViolation, DomainError

SEPARATION = 10e-6
SPACING = 0.05  # wavelength * distance / separation at default settings


def _cfg(**kw):
    return ds.SlitConfig(**kw)


# -- intensity ---------------------------------------------------------------


def test_closed_intensity_is_zero_everywhere():
    cfg = _cfg(left_open=False, right_open=False)
    xs = np.linspace(-0.2, 0.2, 1001)
    assert_array_equal(ds.intensity(xs, cfg), np.zeros_like(xs))


def test_unmarked_center_intensity_is_four():
    assert float(ds.intensity(0.0, _cfg())) == 4.0


def test_first_dark_fringe_sits_at_half_spacing():
    cfg = _cfg()
    dark = SPACING / 2.0
    assert float(ds.intensity(dark, cfg)) < 1e-25
    assert float(ds.intensity(0.8 * dark, cfg)) > 0.1


def test_unmarked_pattern_is_symmetric():
    xs = np.linspace(0.0, 0.2, 801)
    cfg = _cfg()
    assert_array_equal(ds.intensity(-xs, cfg), ds.intensity(xs, cfg))


@pytest.mark.parametrize(
    "left,right,center",
    [(True, False, -SEPARATION / 2), (False, True, SEPARATION / 2)],
)
def test_single_slit_peaks_at_its_own_center(left, right, center):
    cfg = _cfg(left_open=left, right_open=right)
    xs = np.linspace(-0.01, 0.01, 2001)
    values = ds.intensity(xs, cfg)
    peak = float(xs[int(np.argmax(values))])
    assert abs(peak - center) <= float(xs[1] - xs[0])
    offsets = np.linspace(0.0, 0.05, 101)
    assert_allclose(
        ds.intensity(center + offsets, cfg),
        ds.intensity(center - offsets, cfg),
        rtol=1e-9,
    )


def test_marked_pattern_is_sum_of_single_slit_patterns():
    xs = np.linspace(-0.2, 0.2, 4001)
    both = ds.intensity(xs, _cfg(which_path=True))
    left = ds.intensity(xs, _cfg(right_open=False))
    right = ds.intensity(xs, _cfg(left_open=False))
    assert_array_equal(both, left + right)


def test_unmarked_and_marked_patterns_carry_similar_total_weight():
    xs, unmarked = ds.pattern_table(_cfg())
    _, marked = ds.pattern_table(_cfg(which_path=True))
    a = float(np.trapezoid(unmarked, xs))
    b = float(np.trapezoid(marked, xs))
    assert abs(a - b) / b < 0.01


# -- fringe spacing ----------------------------------------------------------


def test_fringe_spacing_default_value():
    assert ds.fringe_spacing(_cfg()) == pytest.approx(SPACING, rel=1e-12)


def test_fringe_spacing_halves_when_separation_doubles():
    base = ds.fringe_spacing(_cfg())
    doubled = ds.fringe_spacing(_cfg(separation=2 * SEPARATION))
    assert doubled == pytest.approx(base / 2.0, rel=1e-12)


@pytest.mark.parametrize(
    "kw",
    [
        {"right_open": False},
        {"left_open": False},
        {"left_open": False, "right_open": False},
        {"which_path": True},
    ],
)
def test_fringe_spacing_needs_an_unmarked_pair(kw):
    with pytest.raises(DomainError):
        ds.fringe_spacing(_cfg(**kw))


def _refined_peaks(xs, values):
    """Local maxima with parabolic sub-grid refinement."""
    step = float(xs[1] - xs[0])
    out = []
    for i in range(1, len(values) - 1):
        if values[i] >= values[i - 1] and values[i] > values[i + 1]:
            denom = values[i - 1] - 2.0 * values[i] + values[i + 1]
            shift = 0.0
            if denom != 0.0:
                shift = 0.5 * (values[i - 1] - values[i + 1]) / denom
            out.append(float(xs[i]) + shift * step)
    return np.asarray(out)


def test_measured_peak_spacing_matches_the_ratio_formula():
    # Divide out the single-slit envelope before peak-finding; the envelope
    # slope would otherwise drag raw maxima toward the center by ~1e-4 m.
    cfg = _cfg()
    xs = np.arange(-0.18, 0.18 + 5e-6, 1e-5)
    envelope = np.sinc(cfg.slit_width * xs / (cfg.wavelength * cfg.screen_distance)) ** 2
    flat = ds.intensity(xs, cfg) / envelope
    peaks = _refined_peaks(xs, flat)
    assert len(peaks) >= 5
    spacings = np.diff(peaks)
    assert float(np.max(np.abs(spacings - ds.fringe_spacing(cfg)))) < 1e-9


# -- tabulation --------------------------------------------------------------


def test_pattern_table_grid_and_range():
    xs, dens = ds.pattern_table(_cfg(), grid=257)
    assert xs.shape == dens.shape == (257,)
    assert float(xs[0]) == -0.2 and float(xs[-1]) == 0.2
    assert np.all(dens >= 0.0)


def test_pattern_table_rejects_degenerate_grid():
    with pytest.raises(ContractViolation):
        ds.pattern_table(_cfg(), grid=1)


def test_cdf_table_is_normalized_and_monotone():
    xs, cdf = ds.cdf_table(_cfg())
    assert float(cdf[0]) == 0.0
    assert float(cdf[-1]) == 1.0
    assert np.all(np.diff(cdf) >= 0.0)
    assert xs.shape == cdf.shape


def test_cdf_table_rejects_weightless_pattern():
    with pytest.raises(DomainError):
        ds.cdf_table(_cfg(left_open=False, right_open=False))


def test_pattern_csv_header_and_rows():
    cfg = _cfg()
    text = ds.pattern_csv(cfg, grid=64)
    lines = text.strip().split("\n")
    assert lines[0] == "x_m,intensity"
    assert len(lines) == 65
    x0, v0 = lines[1].split(",")
    assert float(x0) == -0.2
    assert float(v0) == float(ds.intensity(-0.2, cfg))


# -- sampling ----------------------------------------------------------------


def test_sample_events_deterministic_per_seed():
    a = ds.sample_events(_cfg(), 500, seed=11)
    b = ds.sample_events(_cfg(), 500, seed=11)
    assert_array_equal(a.ticks, b.ticks)
    assert_array_equal(a.x, b.x)
    assert_array_equal(a.y, b.y)
    c = ds.sample_events(_cfg(), 500, seed=12)
    assert not np.array_equal(a.x, c.x)


def test_sample_events_continuation_matches_one_shot():
    cfg = _cfg()
    full = ds.sample_events(cfg, 200, seed=3)
    head = ds.sample_events(cfg, 120, seed=3)
    tail = ds.sample_events(cfg, 80, seed=3, first_tick=120, draw_start=240)
    assert_array_equal(np.concatenate([head.ticks, tail.ticks]), full.ticks)
    assert_array_equal(np.concatenate([head.x, tail.x]), full.x)
    assert_array_equal(np.concatenate([head.y, tail.y]), full.y)


def test_sample_events_bounds_and_tick_numbering():
    ev = ds.sample_events(_cfg(), 2000, seed=5, first_tick=7)
    assert_array_equal(ev.ticks, np.arange(7, 2007))
    assert np.all(np.abs(ev.x) <= 0.2)
    assert np.all(np.abs(ev.y) <= 0.05)


def test_sample_events_empty_and_error_cases():
    assert len(ds.sample_events(_cfg(), 0, seed=1)) == 0
    with pytest.raises(ContractViolation):
        ds.sample_events(_cfg(), -1, seed=1)
    closed = _cfg(left_open=False, right_open=False)
    with pytest.raises(DomainError):
        ds.sample_events(closed, 5, seed=1)
    assert len(ds.sample_events(closed, 0, seed=1)) == 0


def test_single_slit_sample_mean_sits_at_the_slit_center():
    cfg = _cfg(right_open=False)
    ev = ds.sample_events(cfg, 100_000, seed=7)
    se = float(ev.x.std(ddof=1)) / math.sqrt(len(ev))
    assert abs(float(ev.x.mean()) + cfg.separation / 2.0) < 3.0 * se


def _ks_distance(x, cfg):
    xs, cdf = ds.cdf_table(cfg)
    x = np.sort(np.asarray(x))
    model = np.interp(x, xs, cdf)
    n = len(x)
    upper = np.arange(1, n + 1) / n
    return float(max(np.max(upper - model), np.max(model - (upper - 1.0 / n))))


def test_sampling_matches_tabulated_distribution_ks():
    cfg = _cfg()
    ev = ds.sample_events(cfg, 100_000, seed=7)
    assert _ks_distance(ev.x, cfg) < 0.01


@pytest.mark.parametrize(
    "kw",
    [{}, {"which_path": True}, {"right_open": False}, {"left_open": False}],
    ids=["both-unmarked", "both-marked", "left-only", "right-only"],
)
def test_sampling_chi_square_below_strict_critical(kw):
    cfg = _cfg(**kw)
    n = 100_000
    bins = 64
    ev = ds.sample_events(cfg, n, seed=19)
    edges = np.linspace(-cfg.screen_halfwidth, cfg.screen_halfwidth, bins + 1)
    observed, _ = np.histogram(ev.x, bins=edges)
    xs, cdf = ds.cdf_table(cfg)
    expected = n * np.diff(np.interp(edges, xs, cdf))
    assert np.all(expected > 5.0)
    stat = float(np.sum((observed - expected) ** 2 / expected))
    assert stat < float(stats.chi2.ppf(0.999, bins - 1))


def test_events_jsonl_round_trip():
    ev = ds.sample_events(_cfg(), 50, seed=4)
    back = ds.DetectionEvents.from_jsonl(ev.to_jsonl())
    assert_array_equal(back.ticks, ev.ticks)
    assert_array_equal(back.x, ev.x)
    assert_array_equal(back.y, ev.y)
    first = json.loads(ev.to_jsonl().splitlines()[0])
    assert set(first) == {"tick", "x_m", "y_m"}
    assert first["tick"] == 0
    head = next(iter(ev))
    assert head.tick == 0 and head.x == float(ev.x[0])


# -- visibility --------------------------------------------------------------


def test_visibility_high_for_unmarked_pair():
    cfg = _cfg()
    ev = ds.sample_events(cfg, 100_000, seed=7)
    assert ds.visibility(ev, 64, cfg) > 0.9


def test_visibility_low_when_marked():
    cfg = _cfg(which_path=True)
    ev = ds.sample_events(cfg, 100_000, seed=7)
    assert ds.visibility(ev, 64, cfg) < 0.05


def test_visibility_near_zero_for_flat_synthetic_events():
    u = kernels.unit_uniforms(99, 0, 50_000)
    x = (u * 2.0 - 1.0) * 0.2
    ev = ds.DetectionEvents(
        ticks=np.arange(50_000, dtype=np.int64), x=x, y=np.zeros(50_000)
    )
    assert ds.visibility(ev, 64, _cfg()) < 0.05


def test_visibility_rejects_thin_input():
    cfg = _cfg()
    few = ds.sample_events(cfg, ds.MIN_VISIBILITY_EVENTS - 1, seed=2)
    with pytest.raises(DomainError):
        ds.visibility(few, 64, cfg)
    enough = ds.sample_events(cfg, ds.MIN_VISIBILITY_EVENTS, seed=2)
    with pytest.raises(DomainError):
        ds.visibility(enough, ds.MIN_VISIBILITY_BINS - 1, cfg)


# -- source representation ---------------------------------------------------


@pytest.mark.parametrize(
    "kw,mode",
    [
        ({}, "superposed"),
        ({"which_path": True}, "mixture"),
        ({"right_open": False}, "left-only"),
        ({"left_open": False}, "right-only"),
        ({"left_open": False, "right_open": False}, "none"),
    ],
)
def test_source_representation_modes(kw, mode):
    rep = ds.source_representation(_cfg(**kw))
    assert rep.mode == mode
    assert set(rep.to_dict()) == {"mode", "state_form", "system_form"}


def test_source_forms_distinguish_superposition_from_mixture():
    sup = ds.source_representation(_cfg())
    assert "√2" in sup.state_form
    assert "l" in sup.state_form and "r" in sup.state_form
    mix = ds.source_representation(_cfg(which_path=True))
    assert "mixture" in mix.system_form
    assert sup.state_form != mix.state_form


# -- cadence -----------------------------------------------------------------


def test_events_due_examples():
    assert ds.events_due(100.0, 2.0) == 200
    assert ds.events_due(100.0, 0.015) == 1
    assert ds.events_due(100.0, 0.0099) == 0
    assert ds.events_due(0.0, 50.0) == 0
    assert ds.events_due(3.0, 0.0) == 0


def test_events_due_rejects_negative_arguments():
    with pytest.raises(DomainError):
        ds.events_due(-1.0, 1.0)
    with pytest.raises(DomainError):
        ds.events_due(1.0, -0.5)


@given(
    rate=st.integers(min_value=0, max_value=10_000),
    seconds=st.integers(min_value=0, max_value=10_000),
)
@settings(max_examples=40, deadline=None)
def test_events_due_exact_for_integer_products(rate, seconds):
    assert ds.events_due(float(rate), float(seconds)) == rate * seconds


# -- configuration -----------------------------------------------------------


def test_config_round_trip_and_unknown_fields():
    cfg = _cfg(separation=20e-6, which_path=True)
    assert ds.SlitConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ConfigurationError):
        ds.SlitConfig.from_dict({"separation": 1e-5, "phase": 0.1})
    with pytest.raises(ConfigurationError):
        cfg.patched({"colour": "blue"})


def test_patched_updates_and_revalidates():
    cfg = _cfg()
    narrowed = cfg.patched({"separation": 5e-6})
    assert narrowed.separation == 5e-6
    assert cfg.separation == SEPARATION
    with pytest.raises(ConfigurationError):
        cfg.patched({"separation": 1e-6})
    with pytest.raises(ConfigurationError):
        cfg.patched({"left_open": "yes"})


@pytest.mark.parametrize(
    "kw",
    [
        {"wavelength": 0.0},
        {"slit_width": -1e-6},
        {"separation": 2e-6},
        {"screen_distance": 0.0},
        {"screen_halfwidth": -0.1},
        {"rate": -3.0},
        {"wavelength": "green"},
        {"which_path": 1},
    ],
)
def test_config_rejects_bad_values(kw):
    with pytest.raises(ConfigurationError):
        _cfg(**kw)
