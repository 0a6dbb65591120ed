"""Acceptance gate: one test and one PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v`` (the lines are repeated in the
terminal summary) or ``python tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from pseudowell import bound, scattering, sweep
from pseudowell.cli import main
from pseudowell.potentials import PotentialSpec, decompose
from pseudowell.transfer import oracle_amplitudes, oracle_real_bound_states

import conftest

REFERENCE_V0 = math.pi ** 2 / 4
EPSILONS = (1e-2, 1e-3, 1e-4)
SETS_I = [(1.0, 1.0, 0.5), (1.0, 1.0, 1.5), (REFERENCE_V0, 1.0, 2.0),
          (100.0, 10.0, 5.0), (4.0, 2.0, 3.0), (0.5, 3.0, 0.0)]
SETS_II = [(1.0, 1.0, 0.5), (1.0, 1.0, 2.0), (0.8, 1.0, 1.0),
           (2.0, 0.5, 3.0), (0.0, 1.0, 1.0), (3.0, 2.0, 0.7)]


def record(n, ok, detail):
    line = f"CRITERION {n:>2} {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)
    assert ok, line


def scattering_specs():
    return ([PotentialSpec.model_i(*p) for p in SETS_I]
            + [PotentialSpec.model_ii(*p) for p in SETS_II])


def k_points(spec):
    return np.linspace(0.05, 10.0, 64) / spec.a


def binding_specs():
    return ([PotentialSpec.model_i(1.0, 1.0, lam) for lam in np.linspace(0, 1.5, 20)]
            + [PotentialSpec.model_ii(1.0, 1.0, lam) for lam in np.linspace(0, 2, 20)])


def bisect_existence(make, lo, hi, width=1e-8):
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if bound.find_real_bound_states(make(mid)):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_criterion_01_critical_strength():
    t0 = time.perf_counter()
    star = bisect_existence(lambda lam: PotentialSpec.model_i(1.0, 1.0, lam), 0.5, 1.5)
    dt = time.perf_counter() - t0
    record(1, abs(star - 1) < 1e-6 and dt < 1.0, f"lam* = {star:.10f}, |lam*-1| = {abs(star - 1):.1e} (<1e-6), {dt:.2f} s (<1 s)")


def test_criterion_02_model_ii_critical_depth():
    t0 = time.perf_counter()
    above = bool(bound.find_real_bound_states(PotentialSpec.model_ii(0.8 + 1e-3, 1.0, 1.0)))
    below = bool(bound.find_real_bound_states(PotentialSpec.model_ii(0.8 - 1e-3, 1.0, 1.0)))
    dt = time.perf_counter() - t0
    record(2, above and not below and dt < 1.0, f"bound at 0.801: {above}, at 0.799: {below}, {dt:.2f} s (<1 s)")


def test_criterion_03_oracle_scattering():
    t0 = time.perf_counter()
    worst = {"I": 0.0, "II": 0.0}
    for spec in scattering_specs():
        k = k_points(spec)
        closed = scattering.s_matrix(scattering.amplitudes(spec, k))
        oracle = scattering.s_matrix(oracle_amplitudes(decompose(spec), k))
        rel = np.max(np.abs(closed - oracle), axis=(-1, -2)) / np.max(np.abs(oracle), axis=(-1, -2))
        worst[spec.family.value] = max(worst[spec.family.value], float(np.max(rel)))
    dt = time.perf_counter() - t0
    ok = max(worst.values()) < 1e-10 and dt < 5
    record(3, ok, f"max rel err model I {worst['I']:.1e}, model II {worst['II']:.1e} (<1e-10; "
                  f"model II in the resolved reading), {dt:.2f} s (<5 s)")


def test_criterion_04_oracle_bound_states():
    t0 = time.perf_counter()
    worst, unmatched, n = 0.0, 0, 0
    for spec in binding_specs():
        _, beta_max = bound.search_window(spec)
        oracle = oracle_real_bound_states(decompose(spec), beta_max, beta_min=1e-9 / spec.a, n=2048)
        for state in bound.find_real_bound_states(spec):
            n += 1
            gaps = [abs(state.beta.real - r) for r in oracle]
            if not gaps:
                unmatched += 1
                continue
            worst = max(worst, min(gaps))
    dt = time.perf_counter() - t0
    ok = unmatched == 0 and worst < 1e-8 and dt < 5
    record(4, ok, f"{n} roots, max |dbeta| {worst:.1e} (<1e-8), unmatched {unmatched}, {dt:.2f} s (<5 s)")


def test_criterion_05_pseudo_unitarity():
    defect = phase = 0.0
    for spec in scattering_specs():
        data = scattering.amplitudes(spec, k_points(spec))
        defect = max(defect, scattering.pseudo_unitarity_defect(scattering.s_matrix(data)))
        phase = max(phase, *scattering.phase_defects(data))
    record(5, defect < 1e-10 and phase < 1e-10,
           f"max |P S^+ P S - I| {defect:.1e}, max |Re(r t*)| {phase:.1e} (both <1e-10)")


def test_criterion_06_transmission_symmetry():
    diff = max(float(np.max(np.abs(d.tL - d.tR)))
               for d in (scattering.amplitudes(s, k_points(s)) for s in scattering_specs()))
    record(6, diff < 1e-15, f"max |tL - tR| {diff:.1e} (<1e-15)")


def _numeric_root(eps):
    spec = PotentialSpec.model_i(REFERENCE_V0, 1.0, math.sqrt(REFERENCE_V0 - eps))
    if eps > 0:
        return bound.find_real_bound_states(spec, tol=1e-13)[0].beta
    return bound.find_complex_pair(spec, tol=1e-14)[1].beta


def _ratios(series):
    out = {}
    for sign in (1, -1):
        vals = []
        for mag in EPSILONS:
            eps = sign * mag
            pert = max(bound.perturbative_roots_model_i(eps, series)[:2],
                       key=lambda r: r.beta_a.real if eps > 0 else r.beta_a.imag).beta_a
            d = _numeric_root(eps) - pert
            vals.append(max(abs(d.real), abs(d.imag)) / eps ** 2)
        out[sign] = vals
    return out


def test_criterion_07_perturbative_roots():
    t0 = time.perf_counter()
    ratios = _ratios("printed")
    dt = time.perf_counter() - t0
    span = max(max(v) / min(v) for v in ratios.values())
    reference = _ratios("rederived")
    ref_span = max(max(v) / min(v) for v in reference.values())
    fmt = lambda r: "; ".join(("+" if s > 0 else "-") + ": " + "/".join(f"{x:.3g}" for x in v)
                              for s, v in r.items())
    record(7, span <= 5 and dt < 2,
           f"|dbeta| a/eps^2 at eps=1e-2/1e-3/1e-4 {fmt(ratios)}; span {span:.3g} (<=5), {dt:.2f} s (<2 s) "
           f"[consistent O(eps^2) series: {fmt(reference)}, span {ref_span:.3g}]")


def test_criterion_08_complex_pair():
    spec = PotentialSpec.model_i(REFERENCE_V0, 1.0, math.sqrt(REFERENCE_V0 + 1e-2))
    lower, upper = bound.find_complex_pair(spec, tol=1e-14)
    again = bound.newton(lambda b: complex(bound.eigencondition(spec, b)),
                         upper.beta.conjugate() - 1e-3j, tol=1e-14)
    conj = abs(again - upper.beta.conjugate())
    w1, w2 = bound.build_wavefunction(spec, lower), bound.build_wavefunction(spec, upper)
    cross = abs(bound.eta_inner_product(w1, w2))
    selfs = max(abs(bound.eta_inner_product(w, w)) for w in (w1, w2)) / cross
    broken = min(bound.pt_defect(w1), bound.pt_defect(w2))
    real = 0.0
    for s in binding_specs():
        for st in bound.find_real_bound_states(s):
            real = max(real, bound.pt_defect(bound.build_wavefunction(s, st)))
    ok = conj < 1e-10 and selfs < 1e-8 and broken > 0.1 and real < 1e-8
    record(8, ok, f"conjugacy {conj:.1e} (<1e-10), eta self/cross {selfs:.1e} (<1e-8), "
                  f"PT defect pair {broken:.3f} (>0.1), real states {real:.1e} (<1e-8)")


def test_criterion_09_pole_residuals():
    worst, n = 0.0, 0
    for spec in binding_specs():
        for st in bound.find_real_bound_states(spec):
            worst = max(worst, scattering.transmission_pole_residual(spec, st.beta))
            n += 1
    record(9, worst < 1e-8, f"{n} states, max residual {worst:.1e} (<1e-8)")


def test_criterion_10_figures(tmp_path, capsys):
    problems = []
    tables = {}
    for name in sweep.preset_names():
        a, b = tmp_path / f"{name}.csv", tmp_path / f"{name}_again.csv"
        if main(["figure", name, "-o", str(a)]) or main(["figure", name, "-o", str(b)]):
            problems.append(f"{name} exit code")
        if a.read_bytes() != b.read_bytes():
            problems.append(f"{name} not deterministic")
        tables[name] = sweep.read_csv(a.read_text())
    lam, beta = tables["fig1a"].column("lam"), tables["fig1a"].column("beta")
    present = [b for b in beta if b is not None]
    monotone = all(y <= x for x, y in zip(present, present[1:]))
    last = max(i for i, b in enumerate(beta) if b is not None)
    star = bisect_existence(lambda l: PotentialSpec.model_i(1.0, 1.0, l), 0.5, 1.5)
    ends = lam[last] < star <= lam[last + 1] and all(b is None for b in beta[last + 1:])
    dev = max(abs(x) for name in ("fig1d", "fig2d") for x in tables[name].rows[-1][1:])
    ok = not problems and monotone and ends and dev < 1e-2
    record(10, ok, f"8 presets deterministic: {not problems}; fig1a monotone {monotone}, "
                   f"terminates in ({lam[last]:.4f}, {lam[last + 1]:.4f}] around lam* {star:.6f}: {ends}; "
                   f"high-k |dev| {dev:.1e} (<1e-2)")


def test_criterion_11_hermitian_limit():
    dev = 0.0
    for spec in scattering_specs():
        data = scattering.amplitudes(spec.replace(lam=0.0), k_points(spec))
        dev = max(dev, *(float(np.max(np.abs(scattering.unitarity_deviation(data, s)))) for s in "LR"))
    beta = max(abs(bound.find_real_bound_states(PotentialSpec.model_ii(mu, 1.0))[0].beta.real - mu / 2)
               for mu in (0.5, 1.0, 2.0, 3.7))
    record(11, dev < 1e-12 and beta < 1e-12, f"max ||t|^2+|r|^2-1| {dev:.1e} (<1e-12), "
                                             f"max |beta - mu/2| {beta:.1e} (<1e-12)")


def test_check_wall_time():
    from pseudowell.checks import run_check
    t0 = time.perf_counter()
    run_check()
    dt = time.perf_counter() - t0
    assert dt < 30, f"check took {dt:.1f} s"


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
