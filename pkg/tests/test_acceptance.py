"""Acceptance criteria; each test prints one ``PASS``/``FAIL`` line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or
``python3 tests/test_acceptance.py``.
"""
import math
import sys
import time

import numpy as np
import pytest

from forge.chain import (
    ChainSpec,
    RampSpec,
    XYDrive,
    XY_TARGET,
    adiabatic_prepare,
    cluster_stabilizers,
    cluster_state,
    decoupling_distance,
    fit_loglog_slope,
    stroboscopic_errors,
    trotter_errors,
    xy_digital,
    xy_step,
    xy_steps_control,
)
from forge.design import (
    DriveProtocol,
    echo_oracle,
    optimize,
    reduce,
    robustness_scan,
    three_site_hamiltonian,
)
from forge.floquet import coefficient_table, effective_hamiltonian
from forge.pauli import PauliSum, all_strings, commutator, decompose, to_matrix
from forge.platform import (
    NanomagnetParams,
    crosstalk_sweep,
    nanomagnet_fields,
    superconducting_map,
)
from forge.prop import StepControl, evolve, exp_hermitian, log_unitary

from published import (
    CLUSTER_C_OVER_OMEGA,
    CLUSTER_HARMONICS,
    CLUSTER_OMEGA,
    NANOMAGNET_FIELDS_G,
    NANOMAGNET_OMEGA_MHZ,
    REFERENCE_ROWS,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)


def row_protocol(row):
    omega, f0, f1, f2, _ = row
    return DriveProtocol(omega, f0, (f1, f2))


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return emit


def test_01_table_reproduction(verdict):
    ok, parts = True, []
    for row in REFERENCE_ROWS:
        t = coefficient_table(effective_hamiltonian(three_site_hamiltonian(1.0, row_protocol(row))))
        worst = max(abs(t.c_x), abs(t.c_zz), abs(t.c_zy), t.max_other)
        ok &= abs(t.c_zxz - row[4]) <= 1e-6 and worst <= 1e-7
        parts.append(f"w={row[0]:g}: c_zxz={t.c_zxz:.10f} worst_other={worst:.1e}")
    verdict(1, ok, "; ".join(parts))


def test_02_optimizer_recovery(verdict):
    ok, parts = True, []
    start = time.perf_counter()
    for row in REFERENCE_ROWS:
        omega, _, f1, f2, c = row
        res = optimize(omega, c, seeds=[(f1 + 0.1, f2 - 0.1)], workers=1)
        dev = max(abs(a - b) for a, b in zip(res.protocol.harmonics, (f1, f2)))
        ok &= dev <= 1e-6 and res.objective < 1e-16
        parts.append(f"w={omega:g}: |df|={dev:.1e} obj={res.objective:.1e}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    verdict(2, ok, "; ".join(parts) + f"; {elapsed:.1f}s")


def test_03_robustness(verdict):
    p = row_protocol(REFERENCE_ROWS[2])
    ((_, _, cx, czz),) = robustness_scan(p, [1e-2], [1e-3], workers=1)
    ok = cx < 1e-3 and czz < 1e-3
    verdict(3, ok, f"eps=(1e-2, 1e-3): |c_x|={cx:.3e} J, |c_zz|={czz:.3e} J "
                   f"(per omega: {cx / p.omega:.2e}, {czz / p.omega:.2e})")


def test_04_spin_echo(verdict):
    devs = {lam: echo_oracle(1.0, lam).max_deviation for lam in (0.1, 0.4, 1.0)}
    ok = all(d <= 1e-3 for d in devs.values())
    verdict(4, ok, ", ".join(f"lambda={k}: {v:.1e}" for k, v in devs.items()))


def test_05_chain_exactness(verdict):
    p = row_protocol(REFERENCE_ROWS[2])
    ok, parts = True, []
    for spec in (ChainSpec(6, "periodic"), ChainSpec(5, "open")):
        errs = stroboscopic_errors(spec, p, 10)
        # k-cycle error is at most k times the one-cycle error in operator norm
        op = stroboscopic_errors(spec, p, 10, norm="op")
        linear = all(e <= k * op[0] + 1e-12 for k, e in enumerate(op, start=1))
        per_cycle = all(e / k <= 1e-6 for k, e in enumerate(errs, start=1))
        ok &= errs[0] <= 1e-6 and per_cycle and linear
        parts.append(f"N={spec.n} {spec.boundary}: 1 cycle {errs[0]:.1e}, 10 cycles {errs[-1]:.1e}")
    verdict(5, ok, "; ".join(parts))


def test_06_cluster_preparation(verdict):
    p = DriveProtocol.for_target(CLUSTER_OMEGA, CLUSTER_C_OVER_OMEGA * CLUSTER_OMEGA,
                                 CLUSTER_HARMONICS)
    sc = StepControl(128, None, scheme="magnus4")
    residual = adiabatic_prepare(p, RampSpec(300), sc=sc, inactive_field=True)
    bare = adiabatic_prepare(p, RampSpec(300), sc=sc, inactive_field=False)
    diabatic = adiabatic_prepare(p, RampSpec(2), sc=sc)
    ok = max(residual, bare) >= 0.99 and diabatic < 0.9
    verdict(6, ok, f"t_f=300T fidelity {residual:.4f} (residual field) / {bare:.4f} (no field); "
                   f"t_f=2T {diabatic:.4f}")


def test_07_trotter_scaling(verdict):
    ms = [1, 2, 4, 8, 16]
    errs = trotter_errors([PauliSum.single("X"), PauliSum.single("Z")], 1.0, ms)
    slope = fit_loglog_slope(ms, errs)
    verdict(7, abs(slope + 1.0) <= 0.1, f"slope {slope:.4f}")


def test_08_xy_demo(verdict):
    spec, d = ChainSpec(4, "open", "xy"), XYDrive()
    res = xy_digital(spec, d, 100 * d.omega)
    chart = dict(res.chart())
    target = min(chart[s] for s in XY_TARGET)
    undesired = max(v for s, v in chart.items() if s not in XY_TARGET)
    hs = [2, 3, 5, 10, 50, 100]
    curve = [decoupling_distance(spec, d, h * d.omega) for h in hs]
    d5 = curve[hs.index(5)]
    monotone = all(a > b for a, b in zip(curve, curve[1:]))
    ok = target / undesired >= 100 and d5 < 0.01 and monotone
    verdict(8, ok, f"ratio {target / undesired:.1f}, D(5w)={d5:.2e}, "
                   f"D monotone={monotone} ({', '.join(f'{x:.1e}' for x in curve)})")


def test_09_platform_numbers(verdict):
    sc = superconducting_map(10.0, 5.0, row_protocol(REFERENCE_ROWS[2]))
    sc_ok = abs(sc["J_zxz_MHz"] - 2.0) <= 0.1 and sc["max_amplitude_MHz"] < 63.0
    nm = NanomagnetParams()
    fields = nanomagnet_fields(nm, *REFERENCE_ROWS[2][1:4]).as_tuple()
    rel = [abs(a - b) / b for a, b in zip(fields, NANOMAGNET_FIELDS_G)]
    omega_mhz = nm.omega / (2 * math.pi) / 1e6
    nm_ok = all(r <= 0.02 for r in rel) and abs(omega_mhz - NANOMAGNET_OMEGA_MHZ) <= 5
    names = ("B0x", "B1x", "B2x", "B0y", "B1y", "B2y")
    off = [f"{n} {v:.2f}G vs {ref}G" for n, v, ref, r in zip(names, fields, NANOMAGNET_FIELDS_G, rel)
           if r > 0.02]
    verdict(9, sc_ok and nm_ok,
            f"J_zxz={sc['J_zxz_MHz']:.3f} MHz, max amplitude={sc['max_amplitude_MHz']:.2f} MHz, "
            f"omega={omega_mhz:.1f} MHz, fields off by >2%: {off or 'none'}")


def test_10_crosstalk(verdict):
    products = np.linspace(0.5, 4.0, 8)
    rows = crosstalk_sweep(products)
    last_x, last_d = rows[-1]
    ok = last_x >= 3 and last_d < 0.01
    verdict(10, ok, f"D({last_x:g} T)={last_d:.2e}; curve "
                    f"{', '.join(f'{x:g}:{y:.1e}' for x, y in rows)}")


def test_11_property_suites(verdict):
    rng = np.random.default_rng(11)
    checks = {}

    def random_sum(n, k=5):
        strings = all_strings(n)
        picks = rng.choice(len(strings), size=k)
        return PauliSum(n, [(strings[i], complex(*rng.normal(size=2))) for i in picks])

    round_trip, jacobi = 0.0, 0.0
    for n in (1, 2, 3, 4, 5, 6):
        a = random_sum(n)
        round_trip = max(round_trip, (decompose(to_matrix(a)) - a).norm_max())
    for n in (1, 2, 3, 4):
        a, b, c = random_sum(n), random_sum(n), random_sum(n)
        j = (commutator(a, commutator(b, c)) + commutator(b, commutator(c, a))
             + commutator(c, commutator(a, b)))
        jacobi = max(jacobi, j.norm_max())
    checks["pauli round trip"] = round_trip <= 1e-12
    checks["jacobi"] = jacobi <= 1e-12

    h = three_site_hamiltonian(1.0, row_protocol(REFERENCE_ROWS[1]))
    u = evolve(h, 0.0, 2.0)
    checks["unitarity"] = np.max(np.abs(u @ u.conj().T - np.eye(8))) <= 1e-11
    split = evolve(h, 0.8, 2.0) @ evolve(h, 0.0, 0.8)
    checks["composition"] = np.max(np.abs(split - u)) <= 1e-10

    g = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    g = g + g.conj().T
    g *= (math.pi - 0.1) / np.max(np.abs(np.linalg.eigvalsh(g)))
    checks["exp/log"] = np.max(np.abs(log_unitary(exp_hermitian(g, 1.0), 1.0) - g)) <= 1e-10

    p = DriveProtocol.for_target(3.0, -0.2, (0.7, -1.1))
    u_p, u_m, _ = reduce(1.0, p).propagators(StepControl(512, None))
    checks["X conjugation"] = np.max(np.abs(X @ u_p @ X - u_m)) <= 1e-12
    t = coefficient_table(effective_hamiltonian(three_site_hamiltonian(1.0, p),
                                                StepControl(512, None)))
    checks["c_zy symmetric"] = abs(t.c_zy) <= 1e-9

    psi = cluster_state(6)
    checks["stabilizers"] = all(np.max(np.abs(to_matrix(s) @ psi - psi)) <= 1e-12
                                for s in cluster_stabilizers(6))

    spec, d = ChainSpec(4, "open", "xy"), XYDrive()
    hz = 10 * d.omega
    sc = xy_steps_control(hz, d)
    u_xy = (evolve(xy_step(spec, d, hz, 2), 0.0, d.period, sc)
            @ evolve(xy_step(spec, d, hz, 1), 0.0, d.period, sc))
    total_z = to_matrix(PauliSum(4, {"ZIII": 1, "IZII": 1, "IIZI": 1, "IIIZ": 1}))
    checks["total Z"] = np.max(np.abs(u_xy @ total_z - total_z @ u_xy)) <= 1e-11

    failed = [k for k, v in checks.items() if not v]
    verdict(11, not failed, f"{len(checks) - len(failed)}/{len(checks)} properties hold"
                            + (f"; failed: {', '.join(failed)}" if failed else ""))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
