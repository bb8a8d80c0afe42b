"""Map registration: objective arithmetic, resampling, shift recovery."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isopulse import (
    AEH, AlignParams, AxisSpec, Bounds, ContractError, DomainError, Landscape,
    alignment,
)


def _smooth(h, w, phase=0.0):
    y, x = np.mgrid[0:h, 0:w]
    return (np.sin(x / 7.0 + phase) * np.cos(y / 5.0)
            + 0.3 * np.sin(x * y / 200.0))


# ------------------------------------------------------------ primitives

def test_params_validation():
    with pytest.raises(ContractError):
        AlignParams(trims_a=(-1, 0, 0, 0))
    p = AlignParams(dx=2, dy=-3, trims_a=(1, 0, 2, 0))
    assert p.l1 == 8


def test_mse():
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    b = np.zeros((2, 2))
    assert alignment.mse(a, b) == pytest.approx(0.5)
    with pytest.raises(ContractError):
        alignment.mse(a, np.zeros((3, 2)))


def test_shift_map():
    m = np.arange(12.0).reshape(3, 4)
    out = alignment.shift_map(m, 1, -1)
    assert out[0, 1] == m[1, 0]
    assert np.all(out[2] == 0.0)
    assert np.all(out[:, 0] == 0.0)
    assert np.array_equal(alignment.shift_map(m, 0, 0), m)


def test_objective_hand_computed():
    a = np.arange(30.0).reshape(5, 6)
    b = a + 1.0
    # shifting one column left lines a[:, 1:] up with b[:, :-1] exactly
    assert alignment.objective(a, b, AlignParams(dx=-1)) == pytest.approx(0.0)
    assert alignment.objective(a, b, AlignParams()) == pytest.approx(1.0)


def test_objective_trims():
    a = np.arange(30.0).reshape(5, 6)
    b = a.copy()
    b[0, :] = 99.0
    assert alignment.objective(a, b, AlignParams()) > 0
    trimmed = alignment.objective(a, b, AlignParams(trims_b=(0, 0, 1, 0)))
    assert trimmed == pytest.approx(0.0)


def test_objective_empty_overlap():
    a = np.zeros((4, 4))
    with pytest.raises(DomainError):
        alignment.objective(a, a, AlignParams(dx=4))


@given(dx=st.integers(-3, 3), dy=st.integers(-3, 3),
       ta=st.tuples(*[st.integers(0, 2)] * 4),
       tb=st.tuples(*[st.integers(0, 2)] * 4))
@settings(max_examples=80, deadline=None)
def test_objective_swap_invariance(dx, dy, ta, tb):
    a = _smooth(12, 14)
    b = _smooth(12, 14, phase=0.8) ** 2
    fwd = AlignParams(dx=dx, dy=dy, trims_a=ta, trims_b=tb)
    rev = AlignParams(dx=-dx, dy=-dy, trims_a=tb, trims_b=ta)
    try:
        val_ab = alignment.objective(a, b, fwd)
    except DomainError:
        with pytest.raises(DomainError):
            alignment.objective(b, a, rev)
        return
    assert alignment.objective(b, a, rev) == val_ab


# ------------------------------------------------------------- resample

def test_resample_ramp_exact():
    # bilinear interpolation reproduces a plane exactly, corners pinned
    y, x = np.mgrid[0:5, 0:9]
    land = Landscape(2.0 * x + 3.0 * y, AxisSpec(0.0, 8.0, 9),
                     AxisSpec(0.0, 4.0, 5), AEH, 8, "detuning")
    out = alignment.resample_bilinear(land, n_alpha=25, n_beta=13)
    yy, xx = np.mgrid[0:13, 0:25]
    expected = 2.0 * (xx * 8.0 / 24.0) + 3.0 * (yy * 4.0 / 12.0)
    assert np.max(np.abs(out.values - expected)) < 1e-12


def test_resample_landscape_axes():
    land = Landscape(np.zeros((3, 4)), AxisSpec(0.0, 3.0, 4),
                     AxisSpec(-1.0, 1.0, 3), AEH, 8, "detuning")
    out = alignment.resample_bilinear(land, 7, 5)
    assert out.shape == (5, 7)
    assert out.alpha_axis == AxisSpec(0.0, 3.0, 7)
    assert out.beta_axis == AxisSpec(-1.0, 1.0, 5)


def test_bounds_fraction():
    b = Bounds.fraction_of((101, 101))
    assert (b.max_dx, b.max_dy, b.max_trim_x, b.max_trim_y) == (5, 5, 5, 5)
    assert Bounds.fraction_of((10, 10)).max_dx == 1


# ---------------------------------------------------------------- align

def test_align_identity():
    a = _smooth(40, 40)
    res = alignment.align(a, a)
    assert res.params == AlignParams()
    assert res.mse_pre == 0.0
    assert res.mse_post == 0.0


def test_align_recovers_pure_shift():
    a = _smooth(50, 60)
    b = alignment.shift_map(a, 4, -3)
    res = alignment.align(a, b, Bounds(6, 6, 6, 6))
    assert (res.params.dx, res.params.dy) == (4, -3)
    assert res.mse_post == pytest.approx(0.0, abs=1e-25)


def test_align_with_noise():
    rng = np.random.default_rng(7)
    a = _smooth(60, 60)
    b = alignment.shift_map(a, 3, -2) + 0.01 * rng.standard_normal(a.shape)
    res = alignment.align(a, b, Bounds(6, 6, 6, 6))
    assert abs(res.params.dx - 3) <= 1
    assert abs(res.params.dy + 2) <= 1
    assert res.mse_post <= res.mse_pre / 4.0


def test_align_resamples_mismatched_grids():
    a = np.clip(_smooth(30, 30), 0.0, 1.0) * 0.5 + 0.25
    land_a = Landscape(a, AxisSpec(0, 3, 30), AxisSpec(-2, 2, 30),
                       AEH, 8, "detuning")
    land_b = alignment.resample_bilinear(land_a, 23, 19)
    res = alignment.align(land_a, land_b)
    assert res.params.dx == 0 and res.params.dy == 0
    # interpolation error only
    assert res.mse_pre < 1e-3


def test_align_difference_map():
    a = _smooth(30, 30)
    b = alignment.shift_map(a, 2, 1)
    res = alignment.align(a, b, Bounds(4, 4, 4, 4), keep_difference=True)
    assert (res.params.dx, res.params.dy) == (2, 1)
    assert res.difference_map.shape == (29, 28)
    assert np.max(np.abs(res.difference_map)) == pytest.approx(0.0, abs=1e-12)
