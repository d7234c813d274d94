import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neelwall.domain import (PhaseField, Scales, WallConfig, default_branches,
                             lift_and_wind, mobius_metric, mobius_transform,
                             phase_from_m1)

inner = st.floats(min_value=-0.95, max_value=0.95)


@given(inner, inner)
def test_metric_symmetry_and_zero(b, c):
    assert mobius_metric(b, c) == mobius_metric(c, b)
    assert mobius_metric(b, b) == 0.0
    if b != c:
        assert mobius_metric(b, c) > 0.0


@given(inner, inner, inner)
def test_metric_mobius_invariance(b, c, m):
    moved = mobius_metric(mobius_transform(m, b).real, mobius_transform(m, c).real)
    assert moved == pytest.approx(mobius_metric(b, c), abs=1e-12)


@given(inner, inner, inner)
def test_metric_triangle_inequality(a, b, c):
    assert mobius_metric(a, c) <= mobius_metric(a, b) + mobius_metric(b, c) + 1e-12


@given(inner)
def test_transform_fixes_endpoints_and_center(b):
    assert mobius_transform(b, -1.0) == pytest.approx(-1.0)
    assert mobius_transform(b, 1.0) == pytest.approx(1.0)
    assert mobius_transform(b, 0.0) == pytest.approx(b)


@given(inner, st.complex_numbers(max_magnitude=0.9))
def test_transform_preserves_upper_half_plane(b, z):
    z = complex(z.real, abs(z.imag))
    assert mobius_transform(b, z).imag >= -1e-15


@given(st.floats(min_value=0.1, max_value=math.pi - 0.1),
       st.lists(st.sampled_from([-1, 1]), min_size=1, max_size=6))
def test_default_branches_parity(alpha, signs):
    br = default_branches(alpha, signs)
    assert len(br) == len(signs)
    for s, p in zip(signs, br):
        assert p % 2 == (0 if s == 1 else 1)


def test_default_branches_minimal_rotation():
    assert default_branches(math.pi / 2, (1,)) == (0,)
    assert default_branches(math.pi / 2, (1, 1)) == (0, 0)
    # from an even plateau, odd pins are a tie; break downward
    assert default_branches(math.pi / 2, (1, -1)) == (0, -1)


def test_wallconfig_validation():
    with pytest.raises(ValueError):
        WallConfig(alpha=0.0, positions=(0.0,), signs=(1,))
    with pytest.raises(ValueError):
        WallConfig(alpha=1.0, positions=(0.5, 0.2), signs=(1, 1))
    with pytest.raises(ValueError):
        WallConfig(alpha=1.0, positions=(1.0,), signs=(1,))
    with pytest.raises(ValueError):
        WallConfig(alpha=1.0, positions=(0.0,), signs=(2,))
    with pytest.raises(ValueError):
        WallConfig(alpha=1.0, positions=(0.0,), signs=(1,), branches=(1,))


def test_wallconfig_derived_quantities():
    cfg = WallConfig(alpha=math.pi / 2, positions=(-0.5, 0.25), signs=(1, -1))
    assert cfg.N == 2
    assert cfg.gammas == pytest.approx([1.0, -1.0])
    assert cfg.Gamma == pytest.approx(2.0)
    # gaps: to the left boundary 2*0.5, between walls 0.75, to the right 2*0.75
    assert cfg.rho == pytest.approx(0.375)
    assert cfg.pinned_values == (0.0, -math.pi)


def test_snap_and_indices():
    cfg = WallConfig(alpha=1.2, positions=(-0.301, 0.299), signs=(1, 1))
    snapped = cfg.snapped(1000)
    assert snapped.positions == pytest.approx((-0.3, 0.3))
    idx = snapped.wall_indices(1000)
    x = -1.0 + 2.0 / 1000 * np.array(idx)
    assert x == pytest.approx(snapped.positions)
    with pytest.raises(ValueError):
        WallConfig(alpha=1.2, positions=(1e-4, 2e-4), signs=(1, 1)).snapped(100)


def test_roundtrip_dict():
    cfg = WallConfig(alpha=2.2, positions=(-0.4, 0.1, 0.7), signs=(1, -1, 1))
    assert WallConfig.from_dict(cfg.to_dict()) == cfg


def test_scales():
    sc = Scales(1e-3)
    assert sc.delta == pytest.approx(1e-3 * math.log(1e3))
    assert sc.log_inv_delta == pytest.approx(math.log(1.0 / sc.delta))
    with pytest.raises(ValueError):
        Scales(0.7)
    with pytest.raises(ValueError):
        Scales(0.0)


@given(st.integers(min_value=-3, max_value=3), st.floats(0.3, math.pi - 0.3))
@settings(max_examples=30)
def test_winding_integer_on_closed_profiles(k, alpha):
    x = np.linspace(-1, 1, 201)
    ramp = alpha + (x + 1.0) / 2.0 * (2.0 * math.pi * k)
    phase = PhaseField(x, ramp, np.zeros_like(x, dtype=bool), alpha)
    assert lift_and_wind(phase) == k


def test_winding_none_when_open():
    x = np.linspace(-1, 1, 101)
    phase = PhaseField(x, np.linspace(0.4, 1.9, 101), np.zeros(101, dtype=bool), 0.4)
    assert lift_and_wind(phase) is None


def test_phase_from_m1_reconstructs():
    alpha = math.pi / 2
    M = 512
    x = np.linspace(-1, 1, M + 1)
    i_wall = M // 2
    # a smooth dip profile: phi from alpha down to 0 at the wall and back up
    phi_true = alpha * np.abs(np.sin(0.5 * math.pi * x))
    phi_true[i_wall] = 0.0
    m1 = np.cos(phi_true)
    phi = phase_from_m1(x, m1, [i_wall], [0.0], alpha, end_sign=+1)
    assert phi[0] == alpha
    assert phi[i_wall] == 0.0
    assert np.max(np.abs(np.cos(phi) - m1)) < 1e-12
