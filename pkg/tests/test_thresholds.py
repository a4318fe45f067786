import math

import numpy as np
import pytest

from contperc.errors import CapacityError
from contperc.thresholds import (
    AlternationParams,
    distance_profile,
    genealogy_envelope,
    k2_crossover_rho,
    kappa_c,
    kappa_c1_closed_form,
    kappa_c_k,
    objective,
)


def test_params_validation():
    with pytest.raises(ValueError):
        AlternationParams(1.0, 1, (0.0,))
    with pytest.raises(ValueError):
        AlternationParams(2.0, 0, ())
    with pytest.raises(ValueError):
        AlternationParams(2.0, 2, (0.1,))
    with pytest.raises(ValueError):
        AlternationParams(2.0, 1, (1.0,))


def test_distance_profile_zero_offset():
    prof = distance_profile(AlternationParams(3.0, 1, (0.0,)))
    assert prof.distances[0] == 4.0
    assert prof.distances[1] == pytest.approx(4.0 * math.sqrt(2.0), rel=1e-14)


def test_distance_profile_rho3_crossing_offset():
    prof = distance_profile(AlternationParams(3.0, 1, (5.0 / 13.0,)))
    # d_2^2 = 16 + 2*4*(5/13)*4 + 16 = 576/13
    assert prof.final == pytest.approx(24.0 / math.sqrt(13.0), rel=1e-14)


def test_distances_strictly_increase():
    rng = np.random.default_rng(3)
    for _ in range(50):
        k = int(rng.integers(1, 5))
        params = AlternationParams(
            float(rng.uniform(1.01, 8.0)), k, tuple(rng.uniform(0.0, 0.99, size=k))
        )
        dists = distance_profile(params).distances
        assert all(b > a for a, b in zip(dists, dists[1:]))


def test_objective_examples():
    gen, geo = objective(AlternationParams(2.0, 1, (0.0,)))
    assert gen == pytest.approx(math.sqrt(8.0 / 9.0), rel=1e-12)
    assert geo == pytest.approx(4.0 / (3.0 * math.sqrt(2.0)), rel=1e-12)
    assert gen == pytest.approx(geo, rel=1e-12)  # branches meet at rho=2, a=0

    gen, geo = objective(AlternationParams(3.0, 1, (5.0 / 13.0,)))
    assert gen == pytest.approx(math.sqrt(13.0) / 4.0, rel=1e-12)
    assert geo == pytest.approx(math.sqrt(13.0) / 4.0, rel=1e-12)

    gen, _ = objective(AlternationParams(1.5, 1, (0.0,)))
    assert gen == pytest.approx(2.0 * math.sqrt(1.5) / 2.5, rel=1e-12)


def test_monotone_branches():
    # genealogy nondecreasing, geometry nonincreasing in each offset
    for rho, k in ((1.5, 1), (3.0, 1), (2.5, 2)):
        grid = np.linspace(0.0, 0.95, 20)
        for axis in range(k):
            prev = None
            for a in grid:
                offs = [0.3] * k
                offs[axis] = float(a)
                gen, geo = objective(AlternationParams(rho, k, tuple(offs)))
                if prev is not None:
                    assert gen >= prev[0] - 1e-12
                    assert geo <= prev[1] + 1e-12
                prev = (gen, geo)


def test_closed_form_branches():
    assert kappa_c1_closed_form(2.0) == pytest.approx(2.0 * math.sqrt(2.0) / 3.0, rel=1e-14)
    # both branch formulas agree at rho = 2
    assert math.sqrt(4.0 + 4.0) / 3.0 == pytest.approx(2.0 * math.sqrt(2.0) / 3.0, rel=1e-14)
    assert kappa_c1_closed_form(10.0) == pytest.approx(math.sqrt(104.0) / 11.0, rel=1e-14)
    assert kappa_c1_closed_form(1.0 + 1e-12) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        kappa_c1_closed_form(0.5)


def test_optimizer_recovers_closed_form_subset():
    for rho in np.linspace(1.05, 10.0, 25):
        res = kappa_c_k(float(rho), 1)
        assert abs(res.kappa - kappa_c1_closed_form(float(rho))) <= 1e-6
        assert res.kappa == max(res.branch_values)
        if rho >= 2.0:
            expected_a = (rho * rho - 4.0) / (rho * rho + 4.0)
            assert abs(res.offsets[0] - expected_a) <= 1e-4


def test_spec_point_values():
    res = kappa_c_k(1.5, 1)
    assert res.kappa == pytest.approx(0.9797958971132712, abs=1e-6)
    assert res.offsets[0] <= 1e-4
    res = kappa_c_k(3.0, 1)
    assert res.kappa == pytest.approx(math.sqrt(13.0) / 4.0, abs=1e-6)
    assert res.offsets[0] == pytest.approx(5.0 / 13.0, abs=1e-4)
    res = kappa_c_k(2.0, 3)
    assert res.kappa >= (8.0 / 9.0) ** 0.25 - 1e-12


def test_envelope_bound_subset():
    for rho in (1.2, 2.0, 6.0):
        for k in (1, 2, 4):
            res = kappa_c_k(rho, k)
            assert res.kappa >= genealogy_envelope(rho, k) - 1e-12


def test_kappa_c_certification_and_values():
    res = kappa_c(1.5, 4)
    assert res.kappa == pytest.approx(0.9797958971132712, abs=1e-6)
    assert res.k_used == 1
    assert res.certified is True
    # spec arithmetic: envelope already exceeds the min from k = 2 on
    assert genealogy_envelope(1.5, 2) == pytest.approx(0.98648, abs=1e-4)
    assert genealogy_envelope(1.5, 2) > res.kappa

    res2 = kappa_c(2.0, 4)
    assert res2.kappa == pytest.approx(2.0 * math.sqrt(2.0) / 3.0, abs=1e-6)

    for rho, k_max in ((1.3, 3), (4.0, 5), (9.0, 6)):
        res = kappa_c(rho, k_max)
        assert 0.0 < res.kappa < 1.0
        assert res.kappa >= genealogy_envelope(rho, 1) - 1e-12


def test_k1_achieves_minimum_below_rho2():
    for rho in (1.2, 1.7, 2.0):
        assert kappa_c(rho, 5).k_used == 1


def test_large_rho_prefers_longer_paths():
    res = kappa_c(10.0, 3)
    assert res.k_used > 1
    assert res.kappa < kappa_c1_closed_form(10.0) - 1e-3


def test_capacity_limit():
    with pytest.raises(CapacityError):
        kappa_c_k(2.0, 13)
    with pytest.raises(ValueError):
        kappa_c(2.0, 13)


def test_k2_crossover_location():
    # the k = 2 optimum overtakes k = 1 somewhere above rho = 2
    rho_star = k2_crossover_rho(tol=0.05)
    assert 2.0 < rho_star < 12.0
    assert kappa_c_k(rho_star + 0.5, 2).kappa < kappa_c_k(rho_star + 0.5, 1).kappa
