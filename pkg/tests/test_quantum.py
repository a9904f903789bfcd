import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from obsbox.errors import ContractViolation, DomainError
from obsbox.observer import MeterStick, OutcomeStream, run_session
from obsbox.quantum import (
    BornEstimate,
    PhaseFunctions,
    QuantumDescription,
    born_estimate,
    check_unitary,
    infer_amplitudes,
    matrix_from_json,
    matrix_to_json,
    propagator_at,
    standard_projections,
    state_at,
    step,
)
from obsbox.rng import SplitMix64
from obsbox.world import SeededUniformSchedule, WorldObject, WorldSpec

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _random_phases(gen, d):
    omegas = np.array([gen.next_unit() * 20.0 - 10.0 for _ in range(d)])
    thetas = np.array([gen.next_unit() * 2.0 * math.pi for _ in range(d)])
    return PhaseFunctions(omegas=omegas, thetas=thetas)


# ----------------------------------------------------------- projections

def test_standard_projections_d2():
    fam = standard_projections(2)
    assert_allclose(fam.projections[0], np.diag([1.0, 0.0]))
    assert_allclose(fam.projections[1], np.diag([0.0, 1.0]))


@pytest.mark.parametrize("d", range(2, 9))
def test_projection_family_invariants_exact(d):
    fam = standard_projections(d)
    es = fam.projections
    total = np.zeros((d, d), dtype=complex)
    for i, e in enumerate(es):
        assert np.array_equal(e @ e, e)
        assert np.array_equal(e.conj().T, e)
        for j in range(i + 1, d):
            assert not np.any(e @ es[j])
        total += e
    assert np.array_equal(total, np.eye(d, dtype=complex))
    fam.check(1e-12)  # raises on any violated invariant


def test_projections_reject_small_d():
    with pytest.raises(DomainError):
        standard_projections(1)


# ----------------------------------------------------------- state_at

def test_state_basis_vector_up_to_phase():
    phases = PhaseFunctions(omegas=np.array([3.0, -1.0]), thetas=np.array([0.2, 0.4]))
    s = state_at(np.array([1.0, 0.0]), phases, t=2.5)
    assert_allclose(abs(s[0]), 1.0, atol=1e-12)
    assert s[1] == 0.0


def test_state_equal_superposition_at_zero():
    phases = PhaseFunctions(omegas=np.zeros(2), thetas=np.zeros(2))
    s = state_at(np.array([INV_SQRT2, INV_SQRT2]), phases, t=0.0)
    assert_allclose(s, [INV_SQRT2, INV_SQRT2], atol=1e-15)


def test_state_quarter_period_phase():
    phases = PhaseFunctions(omegas=np.array([0.0, math.pi]), thetas=np.zeros(2))
    s = state_at(np.array([INV_SQRT2, INV_SQRT2]), phases, t=0.5)
    assert_allclose(s, [0.7071067811865476, -0.7071067811865476j], atol=1e-12)


def test_state_norm_preserved_for_random_parameters():
    gen = SplitMix64(31)
    for _ in range(50):
        d = 2 + gen.next_below(5)
        raw = np.array([gen.next_unit() + 1e-3 for _ in range(d)])
        alphas = raw / np.linalg.norm(raw)
        s = state_at(alphas, _random_phases(gen, d), t=gen.next_unit() * 9.0)
        assert abs(np.linalg.norm(s) - 1.0) < 1e-12


def test_state_rejects_unnormalized_alphas():
    phases = PhaseFunctions(omegas=np.zeros(2), thetas=np.zeros(2))
    with pytest.raises(ContractViolation):
        state_at(np.array([1.0, 1.0]), phases, t=0.0)


# ----------------------------------------------------------- propagator

def test_propagator_identity_at_zero_phases():
    phases = PhaseFunctions(omegas=np.zeros(3), thetas=np.zeros(3))
    assert np.array_equal(propagator_at(phases, t=0.0), np.eye(3, dtype=complex))


def test_propagator_phase_flip():
    phases = PhaseFunctions(omegas=np.zeros(2), thetas=np.array([0.0, math.pi]))
    u = propagator_at(phases, t=1.0)
    assert_allclose(u, np.diag([1.0, -1.0]).astype(complex), atol=1e-15)


def test_propagator_unitary_over_random_draws():
    gen = SplitMix64(8)
    worst = 0.0
    for _ in range(1000):
        d = 2 + gen.next_below(7)
        u = propagator_at(_random_phases(gen, d), t=gen.next_unit() * 100.0)
        ok, dev = check_unitary(u, 1e-12)
        assert ok
        worst = max(worst, dev)
    assert worst < 1e-12


def test_check_unitary_identity():
    ok, dev = check_unitary(np.eye(4, dtype=complex), 1e-12)
    assert ok and dev == 0.0


def test_check_unitary_rejects_scaling():
    ok, dev = check_unitary(np.diag([1.0, 2.0]).astype(complex), 1e-12)
    assert not ok and dev > 1.0


def test_check_unitary_rejects_non_square():
    with pytest.raises(ContractViolation):
        check_unitary(np.ones((2, 3), dtype=complex), 1e-12)


# ----------------------------------------------------------- stepping

def test_step_identity_keeps_state():
    s = np.array([INV_SQRT2, INV_SQRT2], dtype=complex)
    assert_allclose(step(s, np.eye(2, dtype=complex)), s, atol=1e-15)


def test_step_phase_flip_example():
    s = np.array([INV_SQRT2, INV_SQRT2], dtype=complex)
    u = np.diag([1.0, -1.0]).astype(complex)
    assert_allclose(step(s, u), [INV_SQRT2, -INV_SQRT2], atol=1e-15)


def test_step_rejects_non_unitary():
    s = np.array([1.0, 0.0], dtype=complex)
    with pytest.raises(ContractViolation):
        step(s, np.diag([1.0, 2.0]).astype(complex))


def test_norm_drift_over_ten_thousand_steps():
    gen = SplitMix64(17)
    u = propagator_at(_random_phases(gen, 4), t=1.7)
    raw = np.array([gen.next_unit() + 1e-3 for _ in range(4)])
    s = (raw / np.linalg.norm(raw)).astype(complex)
    for _ in range(10_000):
        s = step(s, u)
    assert abs(np.linalg.norm(s) - 1.0) < 1e-9


# ----------------------------------------------------------- estimation

def _wilson_oracle(k, n):
    z = stats.norm.ppf(0.975)
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return center - half, center + half


def test_born_estimate_degenerate_stream():
    stream = OutcomeStream()
    for t in range(10):
        stream.append(t, 1)
    est = born_estimate(stream)
    assert est.frequencies.tolist() == [0.0, 1.0]
    assert est.counts.tolist() == [0, 10]
    assert_allclose(est.smoothed, [1 / 12, 11 / 12], atol=1e-15)


def test_born_estimate_alternating_stream():
    stream = OutcomeStream()
    for t, b in enumerate([0, 1, 0, 1]):
        stream.append(t, b)
    est = born_estimate(stream)
    assert est.frequencies.tolist() == [0.5, 0.5]


def test_born_estimate_rejects_empty():
    with pytest.raises(DomainError):
        born_estimate(OutcomeStream())


def test_wilson_interval_matches_oracle():
    stream = OutcomeStream()
    bits = [1, 1, 0, 1, 0, 0, 0, 1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0]
    for t, b in enumerate(bits):
        stream.append(t, b)
    est = born_estimate(stream)
    k1 = sum(bits)
    lo, hi = _wilson_oracle(k1, len(bits))
    assert_allclose(est.wilson_low[1], lo, atol=1e-12)
    assert_allclose(est.wilson_high[1], hi, atol=1e-12)
    lo0, hi0 = _wilson_oracle(len(bits) - k1, len(bits))
    assert_allclose(est.wilson_low[0], lo0, atol=1e-12)
    assert_allclose(est.wilson_high[0], hi0, atol=1e-12)


def test_frequencies_reversal_invariant():
    gen = SplitMix64(23)
    stream = OutcomeStream()
    bits = [gen.next_bit() for _ in range(500)]
    for t, b in enumerate(bits):
        stream.append(t, b)
    reverse = OutcomeStream()
    for t, b in enumerate(reversed(bits)):
        reverse.append(t, b)
    a = born_estimate(stream)
    b = born_estimate(reverse)
    assert a.counts.tolist() == b.counts.tolist()
    assert a.frequencies.tolist() == b.frequencies.tolist()


def test_born_frequencies_inside_three_sigma_band():
    # 30 matching and 70 non-matching objects under a seeded uniform schedule
    objs = tuple(
        WorldObject(i, 1.0 if i < 30 else 2.0) for i in range(100)
    )
    spec = WorldSpec(objects=objs)
    stream, _ = run_session(
        spec, SeededUniformSchedule(seed=7), MeterStick(), 300.0, 1e-3, 100_000
    )
    est = born_estimate(stream)
    p = 0.3
    sigma = math.sqrt(p * (1 - p) / 100_000)
    assert abs(est.frequencies[1] - p) < 3 * sigma


def test_infer_amplitudes_examples():
    est = BornEstimate(
        counts=np.array([5, 5]),
        total=10,
        frequencies=np.array([0.5, 0.5]),
        wilson_low=np.zeros(2),
        wilson_high=np.ones(2),
        smoothed=np.array([0.5, 0.5]),
    )
    assert_allclose(infer_amplitudes(est), [INV_SQRT2, INV_SQRT2], atol=1e-15)
    est2 = BornEstimate(
        counts=np.array([10, 0]),
        total=10,
        frequencies=np.array([1.0, 0.0]),
        wilson_low=np.zeros(2),
        wilson_high=np.ones(2),
        smoothed=np.array([11 / 12, 1 / 12]),
    )
    assert_allclose(infer_amplitudes(est2), [1.0, 0.0], atol=1e-15)
    est3 = BornEstimate(
        counts=np.array([70, 30]),
        total=100,
        frequencies=np.array([0.7, 0.3]),
        wilson_low=np.zeros(2),
        wilson_high=np.ones(2),
        smoothed=np.array([0.7, 0.3]),
    )
    alphas = infer_amplitudes(est3)
    assert_allclose(alphas, [0.8367, 0.5477], atol=1e-4)
    assert abs(np.sum(alphas**2) - 1.0) < 1e-12


# ----------------------------------------------------------- description

def test_quantum_description_round_trip():
    desc = QuantumDescription(
        alphas=np.array([0.6, 0.8]),
        omegas=np.array([1.5, -2.5]),
        thetas=np.array([0.0, 0.25]),
    )
    doc = desc.to_dict()
    assert doc["d"] == 2
    back = QuantumDescription.from_dict(json.loads(json.dumps(doc)))
    assert_allclose(back.alphas, desc.alphas)
    assert_allclose(back.omegas, desc.omegas)
    assert_allclose(back.thetas, desc.thetas)


def test_quantum_description_validates_dimension():
    with pytest.raises(ContractViolation):
        QuantumDescription.from_dict(
            {"d": 3, "alphas": [1.0, 0.0], "omegas": [0, 0], "thetas": [0, 0]}
        )


def test_description_state_and_propagator_consistent():
    desc = QuantumDescription(
        alphas=np.array([0.6, 0.8]),
        omegas=np.array([2.0, 0.5]),
        thetas=np.array([0.1, 0.9]),
    )
    # the propagator at t carries the bare amplitude vector to the state at t
    u = desc.propagator_at(1.7)
    assert_allclose(u @ desc.alphas.astype(complex), desc.state_at(1.7), atol=1e-12)


def test_matrix_json_round_trip():
    gen = SplitMix64(77)
    m = np.array(
        [
            [complex(gen.next_unit(), gen.next_unit()) for _ in range(3)]
            for _ in range(3)
        ]
    )
    doc = matrix_to_json(m)
    assert doc[0][0] == [m[0, 0].real, m[0, 0].imag]
    back = matrix_from_json(json.loads(json.dumps(doc)))
    assert np.array_equal(back, m)
