import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from forge.design import (
    DriveProtocol,
    SUCCESS_THRESHOLD,
    _minimize_from,
    default_robustness_grid,
    default_seeds,
    echo_oracle,
    objective,
    optimize,
    reduce,
    robustness_scan,
    su2_extract,
    three_site_hamiltonian,
)
from forge.errors import DimensionError, ForgeError
from forge.floquet import coefficient_table, effective_hamiltonian
from forge.pauli import PauliSum
from forge.prop import StepControl, TimeDependentHamiltonian, evolve, exp_hermitian

from published import REFERENCE_ROWS

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0 + 0j, -1.0])
ROW3 = REFERENCE_ROWS[2]
FINE = StepControl(2048, None)


def row_protocol(row):
    omega, f0, f1, f2, _ = row
    return DriveProtocol(omega, f0, (f1, f2))


amplitudes = st.floats(-2.5, 2.5)


# ----------------------------------------------------------------- protocol


def test_protocol_for_target():
    p = DriveProtocol.for_target(5.0, -0.2, (1.0, 1.2))
    assert p.f0 == pytest.approx(0.04)
    assert p.c_zxz == pytest.approx(-0.2)
    assert p.f_over_omega == [p.f0, 1.0, 1.2]
    assert p.period == pytest.approx(2 * math.pi / 5)


@given(amplitudes, amplitudes, st.floats(0, 1))
def test_drive_symmetric_about_half_period(f1, f2, s):
    p = DriveProtocol(3.0, 0.1, (f1, f2))
    t = s * p.period / 2
    assert p.value(p.period / 2 + t) == pytest.approx(p.value(p.period / 2 - t), abs=1e-12)


def test_protocol_rejects_bad_omega():
    with pytest.raises(ValueError):
        DriveProtocol(0.0, 0.1)


# ---------------------------------------------------------------- reduction


def test_reduce_without_drive():
    r = reduce(1.0, DriveProtocol(5.0, 0.0, ()))
    for h, bias in ((r.h_plus, 2.0), (r.h_minus, -2.0), (r.h_zero, 0.0)):
        assert np.allclose(h.matrix(0.3), bias * Z)


def test_reduce_rejects_edge_drive():
    with pytest.raises(DimensionError):
        reduce(1.0, DriveProtocol(5.0, 0.04, (1.0,), sites=(1,)))
    with pytest.raises(DimensionError):
        three_site_hamiltonian(1.0, DriveProtocol(5.0, 0.04, (1.0,), sites=(1, 3)))


@settings(max_examples=10)
@given(amplitudes, amplitudes, st.sampled_from([1.0, 2.0, 5.0]))
def test_x_conjugation(f1, f2, omega):
    r = reduce(1.0, DriveProtocol.for_target(omega, -0.2, (f1, f2)))
    u_plus, u_minus, _ = r.propagators(StepControl(256, None))
    assert np.max(np.abs(X @ u_plus @ X - u_minus)) < 1e-12


def test_block_structure_matches_full_space():
    p = row_protocol(ROW3)
    u_full = evolve(three_site_hamiltonian(1.0, p), 0.0, p.period, FINE)
    u_p, u_m, u_0 = reduce(1.0, p).propagators(FINE)
    # basis index = 4 s1 + 2 s2 + s3, s = 0 for spin up
    blocks = {(0, 0): u_p, (1, 1): u_m, (0, 1): u_0, (1, 0): u_0}
    for (s1, s3), u in blocks.items():
        idx = [4 * s1 + 2 * s2 + s3 for s2 in (0, 1)]
        assert np.max(np.abs(u_full[np.ix_(idx, idx)] - u)) < 1e-12
    assert np.count_nonzero(np.abs(u_full) > 1e-12) == 16


def test_anti_aligned_block_is_exact():
    """With neighbours anti-aligned only the drive acts: U_0 = exp(+i c X T)."""
    p = row_protocol(ROW3)
    _, _, u_0 = reduce(1.0, p).propagators(FINE)
    assert np.max(np.abs(u_0 - exp_hermitian(p.c_zxz * X, -p.period))) < 1e-12


# --------------------------------------------------------------- su2 parse


def test_su2_examples():
    assert np.array_equal(su2_extract(np.eye(2)), np.zeros(3))
    assert np.allclose(su2_extract(exp_hermitian(0.3 * X)), [0.3, 0, 0], atol=1e-15)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_su2_round_trip(ax, ay, az):
    a = np.array([ax, ay, az])
    if np.linalg.norm(a) > math.pi - 1e-3:
        return
    u = exp_hermitian(ax * X + ay * Y + az * Z)
    assert np.allclose(su2_extract(u), a, atol=1e-12)


def test_su2_rejects_bad_input():
    with pytest.raises(ValueError):
        su2_extract(1j * np.eye(2))
    with pytest.raises(ForgeError):
        su2_extract(-np.eye(2))


def test_symmetric_drive_has_no_y_component():
    p = row_protocol(ROW3)
    a = su2_extract(evolve(reduce(1.0, p).h_plus, 0.0, p.period, FINE))
    assert abs(a[1]) < 1e-9


# ----------------------------------------------------------------- objective


def test_objective_at_published_optimum():
    ov = objective(*ROW3[2:4], omega=ROW3[0], c_target=ROW3[4])
    assert ov.value < SUCCESS_THRESHOLD
    assert ov.value == ov.d_x**2 + ov.d_z**2


def test_objective_static_drive_closed_form():
    """No harmonics: H_+ = -c X + 2J Z is constant, so a = (-c, 0, 2J) T."""
    omega, c = 5.0, -0.2
    ov = objective(0.0, 0.0, omega=omega, c_target=c)
    d_x, d_z = -c - c, 2.0
    assert ov.d_x == pytest.approx(d_x, abs=1e-12)
    assert ov.d_z == pytest.approx(d_z, abs=1e-12)
    assert ov.value == pytest.approx(d_x**2 + d_z**2, abs=1e-11)


def test_coefficients_follow_deviations():
    """Block structure fixes c_x = d_x/2, c_zz = d_z/2, c_zxz = c + d_x/2."""
    p = row_protocol(ROW3).scaled([1.01, 1.0])
    ov = objective(*p.harmonics, omega=p.omega, c_target=ROW3[4], sc=FINE)
    t = coefficient_table(effective_hamiltonian(three_site_hamiltonian(1.0, p), FINE))
    assert abs(t.c_x - ov.d_x / 2) < 1e-10
    assert abs(t.c_zz - ov.d_z / 2) < 1e-10
    assert abs(t.c_zxz - (ROW3[4] + ov.d_x / 2)) < 1e-10


def test_perturbation_matches_robustness_scale():
    p = row_protocol(ROW3).scaled([1.01, 1.0])
    ov = objective(*p.harmonics, omega=p.omega, c_target=ROW3[4])
    assert abs(ov.d_x) / 2 < 1e-2 and abs(ov.d_z) / 2 < 1e-2


# ---------------------------------------------------------------- optimizer


def test_optimize_recovers_omega5_row():
    res = optimize(5.0, -0.2, seeds=[(1.0, 1.2)], workers=1)
    assert res.converged and res.objective < SUCCESS_THRESHOLD
    assert np.allclose(res.protocol.harmonics, ROW3[2:4], atol=1e-6)
    t = coefficient_table(effective_hamiltonian(three_site_hamiltonian(1.0, res.protocol)))
    assert abs(t.c_zxz + 0.2) < 1e-8
    assert max(abs(t.c_x), abs(t.c_zz), abs(t.c_zy)) < 1e-8
    report = res.report()
    assert set(report) >= {"omega_over_J", "c_target_over_J", "f_over_omega", "dx", "dz",
                           "evaluations"}


def test_zero_target_keeps_zero_drive():
    # at omega = 2J the bare up-up propagator exp(-i 2J Z T) is the identity
    res = optimize(2.0, 0.0, seeds=[(0.0, 0.0)], workers=1)
    assert res.objective < SUCCESS_THRESHOLD
    assert np.allclose(res.protocol.harmonics, 0.0, atol=1e-8)


def test_stalled_search_is_flagged_unconverged(monkeypatch):
    import forge.design as design

    def stalled(fun, x0, **kwargs):
        fun(x0)
        return SimpleNamespace(x=np.asarray(x0))

    monkeypatch.setattr(design, "minimize", stalled)
    res = _minimize_from((0.5, 0.5), 5.0, -0.2, 1.0, StepControl(256, None), 1e-10)
    assert res.evaluations == 1
    assert res.objective == pytest.approx(res.d_x**2 + res.d_z**2)
    assert res.converged == (res.objective < SUCCESS_THRESHOLD)
    assert not res.converged


def test_optimize_needs_a_seed():
    with pytest.raises(ValueError):
        optimize(5.0, -0.2, seeds=[])


def test_default_seed_grid():
    seeds = default_seeds()
    assert len(seeds) == 25
    assert seeds[0] == (-3.0, -3.0) and seeds[-1] == (3.0, 3.0)


# --------------------------------------------------------------- robustness


def test_robustness_points():
    p = row_protocol(ROW3)
    rows = robustness_scan(p, [0.0, 5e-3, 1e-2], [0.0], workers=1)
    assert [r[:2] for r in rows] == [(0.0, 0.0), (5e-3, 0.0), (1e-2, 0.0)]
    assert max(rows[0][2:]) < 1e-8
    # leading-order response: doubling the error doubles the coefficients
    for k in (2, 3):
        assert rows[2][k] / rows[1][k] == pytest.approx(2.0, rel=0.02)


def test_robustness_default_grid():
    g = default_robustness_grid()
    assert len(g) == 41
    assert g[0] == pytest.approx(1e-5) and g[-1] == pytest.approx(1e-1)


# --------------------------------------------------------------------- echo


def test_echo_without_pulse_is_identity():
    res = echo_oracle(1.0, 0.0)
    for u in res.numeric + res.analytic:
        assert np.max(np.abs(u - np.eye(2))) < 1e-12


def test_free_evolution_over_window_is_identity():
    """H_+ = 2J Z over T = pi/J gives exp(-2 pi i Z) = +1."""
    h = TimeDependentHamiltonian(PauliSum.single("Z", 2.0), (), math.pi)
    assert np.max(np.abs(evolve(h, 0.0, math.pi) - np.eye(2))) < 1e-12


@pytest.mark.parametrize("lam", [0.1, 0.4, 1.0])
def test_echo_matches_analytic(lam):
    assert echo_oracle(1.0, lam).max_deviation < 1e-3


def test_echo_scales_with_coupling():
    res = echo_oracle(2.0, 0.4)
    assert res.period == pytest.approx(math.pi / 2)
    assert res.max_deviation < 1e-3
