"""Unit tests for the scalar trust math."""

import math
import random

import pytest

from sparsedebate.trust import (
    RecalibrationThresholds,
    credibility,
    edge_weight,
    edge_weight_cr_only,
    intimacy,
    recalibrate,
    scaling_loss,
    self_orientation,
    update_reliability,
    update_sim,
)


# -- recalibration -----------------------------------------------------


def test_recalibrate_branches():
    assert recalibrate(0.95) == 0.8
    assert recalibrate(0.45) == 0.45
    assert recalibrate(0.10) == 0.30


def test_recalibrate_boundaries_map_to_themselves():
    assert recalibrate(0.8) == 0.8
    assert recalibrate(0.6) == 0.6
    assert recalibrate(0.3) == 0.3


def test_recalibrate_idempotent_and_monotone():
    previous = -1.0
    for i in range(0, 1001):
        h = i / 1000
        out = recalibrate(h)
        assert recalibrate(out) == out
        assert out >= previous
        previous = out


def test_recalibrate_range():
    for i in range(0, 1001):
        out = recalibrate(i / 1000)
        assert out == 0.8 or out == 0.6 or 0.3 <= out < 0.6


def test_recalibrate_rejects_out_of_range():
    with pytest.raises(ValueError):
        recalibrate(-0.1)
    with pytest.raises(ValueError):
        recalibrate(1.1)


def test_recalibrate_custom_thresholds():
    t = RecalibrationThresholds(hi=0.9, mid=0.7, lo=0.2)
    assert recalibrate(0.95, t) == 0.9
    assert recalibrate(0.75, t) == 0.7
    assert recalibrate(0.5, t) == 0.5
    assert recalibrate(0.05, t) == 0.2


def test_threshold_ordering_enforced():
    with pytest.raises(ValueError):
        RecalibrationThresholds(hi=0.5, mid=0.6, lo=0.3)
    with pytest.raises(ValueError):
        RecalibrationThresholds(hi=1.2, mid=0.6, lo=0.3)
    with pytest.raises(ValueError):
        RecalibrationThresholds(hi=0.8, mid=0.6, lo=0.0)


# -- scaling law -------------------------------------------------------


def test_scaling_loss_unit_base_case():
    assert scaling_loss(1, 1) == 818.79


def test_scaling_loss_spot_value():
    # 50-digit reference evaluation of the closed form.
    assert math.isclose(scaling_loss(7e9, 2e12), 2.0203012597001139, rel_tol=1e-12)


def test_scaling_loss_strictly_decreasing():
    rng = random.Random(3)
    for _ in range(200):
        n = 10 ** rng.uniform(0, 12)
        m = 10 ** rng.uniform(0, 13)
        assert scaling_loss(n * 2, m) < scaling_loss(n, m)
        assert scaling_loss(n, m * 2) < scaling_loss(n, m)


def test_scaling_loss_rejects_nonpositive():
    with pytest.raises(ValueError):
        scaling_loss(0, 1)
    with pytest.raises(ValueError):
        scaling_loss(1, -5)


def test_credibility_values_and_bound():
    assert credibility(1, 1) == 1 / 818.79
    assert math.isclose(credibility(7e9, 2e12), 0.4949756850364170, rel_tol=1e-12)
    rng = random.Random(4)
    for _ in range(500):
        n = 10 ** rng.uniform(0, 14)
        m = 10 ** rng.uniform(0, 14)
        assert 0 < credibility(n, m) < 1 / 1.69


# -- running means -----------------------------------------------------


def test_update_reliability_base_and_steps():
    assert update_reliability(123.0, 1, 0.6) == 0.6
    assert update_reliability(0.6, 2, 0.8) == pytest.approx(0.7)
    assert update_reliability(0.7, 3, 0.3) == pytest.approx(1.7 / 3)


def test_update_reliability_equals_direct_mean():
    rng = random.Random(5)
    for _ in range(100):
        values = [rng.random() for _ in range(rng.randint(1, 8))]
        r = 0.0
        for d, h in enumerate(values, start=1):
            r = update_reliability(r, d, h)
        assert abs(r - sum(values) / len(values)) < 1e-12


def test_update_sim_base_and_steps():
    assert update_sim(0.0, 1, 0.9) == 0.9
    assert update_sim(0.9, 2, 0.5) == pytest.approx(0.7)


def test_update_sim_constant_sequence_stays_one():
    sim = 0.0
    for d in range(1, 10):
        sim = update_sim(sim, d, 1.0)
        assert sim == pytest.approx(1.0)


def test_update_sim_equals_direct_mean():
    rng = random.Random(6)
    for _ in range(100):
        values = [rng.uniform(-1, 1) for _ in range(rng.randint(1, 8))]
        s = 0.0
        for d, c in enumerate(values, start=1):
            s = update_sim(s, d, c)
        assert abs(s - sum(values) / len(values)) < 1e-12


def test_domain_checks():
    with pytest.raises(ValueError):
        update_reliability(0.5, 0, 0.5)
    with pytest.raises(ValueError):
        update_sim(0.5, 1, 1.5)


# -- intimacy / self-orientation / weights -----------------------------


def test_intimacy_values():
    assert intimacy(1.0) == 0.0
    assert intimacy(0.0) == 1.0
    assert intimacy(0.7) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        intimacy(1.5)


def test_self_orientation_clamp_and_values():
    assert self_orientation(1, 5, 0) == 1.0  # raw 0 clamped
    assert self_orientation(3, 5, 5) == 3.0
    assert self_orientation(3, 5, 8) == 1.0  # raw 0 at the participation cap
    with pytest.raises(ValueError):
        self_orientation(3, 5, 9)


def test_edge_weight_arithmetic_and_zeros():
    assert edge_weight(0.5, 0.8, 0.5, 2.0) == pytest.approx(0.1)
    assert edge_weight(0.5, 0.8, 0.0, 2.0) == 0.0
    assert edge_weight(0.5, 0.0, 0.5, 2.0) == 0.0


def test_edge_weight_scale_covariant_in_credibility():
    rng = random.Random(7)
    for _ in range(100):
        c, r, i, s = rng.uniform(0.01, 0.6), rng.random(), rng.uniform(0, 2), rng.uniform(1, 9)
        k = rng.uniform(0.1, 10)
        assert edge_weight(k * c, r, i, s) == pytest.approx(k * edge_weight(c, r, i, s))


def test_edge_weight_domain():
    with pytest.raises(ValueError):
        edge_weight(0.0, 0.5, 0.5, 1.0)
    with pytest.raises(ValueError):
        edge_weight(0.5, 0.5, 0.5, 0.5)


def test_edge_weight_cr_only():
    assert edge_weight_cr_only(0.5, 0.8) == pytest.approx(0.4)
    assert edge_weight_cr_only(0.5, 0.0) == 0.0
    assert edge_weight_cr_only(1 / 1.69, 1.0) == pytest.approx(0.5917159763313609)
