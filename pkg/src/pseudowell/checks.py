"""The invariant suite behind ``pseudowell check``.

Every item compares two independent routes (closed forms against the transfer
oracle, solver roots against oracle roots, numerics against expansions) and
reports the largest defect it saw next to its tolerance.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bound, scattering, sweep
from .potentials import Family, PotentialSpec, critical_depth, decompose
from .transfer import oracle_amplitudes, oracle_real_bound_states

REFERENCE_V0 = math.pi ** 2 / 4  # sqrt(v0 a^2) = pi/2 with a = 1
EPSILONS = (1e-2, 1e-3, 1e-4)

MODEL_I_SETS = [(1.0, 1.0, 0.5), (1.0, 1.0, 1.5), (REFERENCE_V0, 1.0, 2.0),
                (100.0, 10.0, 5.0), (4.0, 2.0, 3.0), (0.5, 3.0, 0.0)]
MODEL_II_SETS = [(1.0, 1.0, 0.5), (1.0, 1.0, 2.0), (0.8, 1.0, 1.0),
                 (2.0, 0.5, 3.0), (0.0, 1.0, 1.0), (3.0, 2.0, 0.7)]
FAULTS = ("flip-jump", "corrupt-t")


def scattering_specs():
    return ([PotentialSpec.model_i(*p) for p in MODEL_I_SETS]
            + [PotentialSpec.model_ii(*p) for p in MODEL_II_SETS])


def k_grid(spec: PotentialSpec, n=64):
    return np.linspace(0.05, 10.0, n) / spec.a


def binding_specs():
    """20-point imaginary-strength grids at the fig1a and fig2a preset parameters."""
    out = [PotentialSpec.model_i(1.0, 1.0, lam) for lam in np.linspace(0.0, 1.5, 20)]
    out += [PotentialSpec.model_ii(1.0, 1.0, lam) for lam in np.linspace(0.0, 2.0, 20)]
    return out


@dataclass
class CheckItem:
    name: str
    passed: bool
    defect: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<38} max defect {self.defect:.3e}  (tol {self.tolerance:.1e})  {self.detail}"


@dataclass
class CheckReport:
    items: list[CheckItem]
    elapsed: float = 0.0
    settings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    @property
    def failures(self) -> list[str]:
        return [item.name for item in self.items if not item.passed]

    def render(self) -> str:
        lines = [item.line() for item in self.items]
        verdict = "all checks passed" if self.passed else f"FAILED: {', '.join(self.failures)}"
        lines.append(f"{verdict}  [{self.elapsed:.1f} s]")
        return "\n".join(lines)


@dataclass(frozen=True)
class Settings:
    fault: str | None = None
    model2_variant: str = "resolved"
    perturbative_series: str = "printed"

    @property
    def jump_sign(self) -> float:
        return -1.0 if self.fault == "flip-jump" else 1.0


def _closed(spec, k, settings: Settings):
    data = scattering.amplitudes(spec, k, settings.model2_variant)
    if settings.fault == "corrupt-t":
        data = scattering.ScatteringData(data.k, data.tL * 1.1, data.tR, data.rL, data.rR)
    return data


def _states(spec, settings: Settings):
    return bound.find_real_bound_states(spec, variant=settings.model2_variant)


def _oracle_roots(spec, settings: Settings):
    eps, beta_max = bound.search_window(spec)
    return oracle_real_bound_states(decompose(spec), beta_max, beta_min=eps,
                                    n=bound.GRID_POINTS, jump_sign=settings.jump_sign)


def _exists(spec, settings):
    return bool(_states(spec, settings))


# -- items ---------------------------------------------------------------------

def critical_strength_model_i(settings: Settings) -> CheckItem:
    spec = PotentialSpec.model_i(1.0, 1.0)
    lo, hi = 0.5, 1.5
    if not _exists(spec.replace(lam=lo), settings) or _exists(spec.replace(lam=hi), settings):
        return CheckItem("critical-strength-model-i", False, math.inf, 1e-6, "no bracket")
    while hi - lo > 1e-8:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if _exists(spec.replace(lam=mid), settings) else (lo, mid)
    star = 0.5 * (lo + hi)
    err = abs(star - 1.0)
    return CheckItem("critical-strength-model-i", err < 1e-6, err, 1e-6, f"lam* = {star:.9f}")


def critical_depth_model_ii(settings: Settings) -> CheckItem:
    mu_cr = critical_depth(Family.MODEL_II, 1.0, 1.0)
    above = _exists(PotentialSpec.model_ii(mu_cr + 1e-3, 1.0, 1.0), settings)
    below = _exists(PotentialSpec.model_ii(mu_cr - 1e-3, 1.0, 1.0), settings)
    ok = above and not below
    return CheckItem("critical-depth-model-ii", ok, 0.0 if ok else 1.0, 0.5,
                     f"mu_cr = {mu_cr:.6f}; bound above: {above}, below: {below}")


def _relative_error(a: scattering.ScatteringData, b: scattering.ScatteringData) -> float:
    Sa, Sb = scattering.s_matrix(a), scattering.s_matrix(b)
    scale = np.max(np.abs(Sb), axis=(-1, -2))
    return float(np.max(np.max(np.abs(Sa - Sb), axis=(-1, -2)) / scale))


def oracle_scattering(settings: Settings) -> CheckItem:
    worst = {Family.MODEL_I: 0.0, Family.MODEL_II: 0.0}
    for spec in scattering_specs():
        k = k_grid(spec)
        err = _relative_error(_closed(spec, k, settings),
                              oracle_amplitudes(decompose(spec), k, settings.jump_sign))
        worst[spec.family] = max(worst[spec.family], err)
    defect = max(worst.values())
    return CheckItem("oracle-equivalence-scattering", defect < 1e-10, defect, 1e-10,
                     f"model I {worst[Family.MODEL_I]:.1e}, model II {worst[Family.MODEL_II]:.1e} "
                     f"(model II reading: {settings.model2_variant})")


def oracle_bound_states(settings: Settings) -> CheckItem:
    defect, mismatched, count = 0.0, 0, 0
    for spec in binding_specs():
        solver = [s.beta.real for s in _states(spec, settings)]
        oracle = _oracle_roots(spec, settings)
        count += len(solver)
        if len(solver) != len(oracle):
            mismatched += 1
            defect = math.inf
            continue
        for a, b in zip(solver, oracle):
            defect = max(defect, abs(a - b))
    ok = defect < 1e-8 and mismatched == 0
    return CheckItem("oracle-equivalence-bound-states", ok, defect, 1e-8,
                     f"{count} solver roots over 40 specs, {mismatched} root-count mismatches")


def pseudo_unitarity(settings: Settings) -> CheckItem:
    defect = phase = oracle_defect = 0.0
    for spec in scattering_specs():
        k = k_grid(spec)
        data = _closed(spec, k, settings)
        defect = max(defect, scattering.pseudo_unitarity_defect(scattering.s_matrix(data)))
        phase = max(phase, *scattering.phase_defects(data))
        odata = oracle_amplitudes(decompose(spec), k, settings.jump_sign)
        oracle_defect = max(oracle_defect, scattering.pseudo_unitarity_defect(scattering.s_matrix(odata)))
    worst = max(defect, phase, oracle_defect)
    return CheckItem("pseudo-unitarity", worst < 1e-10, worst, 1e-10,
                     f"closed {defect:.1e}, phase {phase:.1e}, oracle {oracle_defect:.1e}")


def transmission_symmetry(settings: Settings) -> CheckItem:
    defect = 0.0
    for spec in scattering_specs():
        data = _closed(spec, k_grid(spec), settings)
        defect = max(defect, float(np.max(np.abs(data.tL - data.tR))))
    return CheckItem("tL-equals-tR", defect < 1e-15, defect, 1e-15)


def numeric_root_near_critical(epsilon: float) -> complex:
    """Least-bound (or upper complex) root ``beta*a`` at the reference point."""
    spec = PotentialSpec.model_i(REFERENCE_V0, 1.0, math.sqrt(REFERENCE_V0 - epsilon))
    if epsilon > 0:
        return complex(bound.find_real_bound_states(spec, tol=1e-13)[0].beta)
    pair = bound.find_complex_pair(spec, tol=1e-14)
    return pair[1].beta


def perturbative_ratios(series: str):
    """``{sign: [|beta_num - beta_pert| a / eps^2 per decade]}``, complex compared per component."""
    out = {}
    for sign in (1, -1):
        ratios = []
        for mag in EPSILONS:
            eps = sign * mag
            numeric = numeric_root_near_critical(eps)
            pert = max(bound.perturbative_roots_model_i(eps, series)[:2],
                       key=lambda r: (r.beta_a.real if eps > 0 else r.beta_a.imag)).beta_a
            diff = numeric - pert
            ratios.append(max(abs(diff.real), abs(diff.imag)) / eps ** 2)
        out[sign] = ratios
    return out


def _perturbative_item(name, series) -> CheckItem:
    ratios = perturbative_ratios(series)
    spans = {s: max(r) / min(r) for s, r in ratios.items()}
    worst = max(spans.values())
    detail = ", ".join(f"eps{'+' if s > 0 else '-'}: " + "/".join(f"{x:.3g}" for x in r)
                       for s, r in ratios.items())
    return CheckItem(name, worst <= 5.0, worst, 5.0, f"ratio span; |dbeta|a/eps^2 = {detail}")


def perturbative_order(settings: Settings) -> list[CheckItem]:
    items = [_perturbative_item(f"perturbative-order ({settings.perturbative_series})",
                                settings.perturbative_series)]
    if settings.perturbative_series == "printed":
        info = _perturbative_item("perturbative-order (rederived, info)", "rederived")
        info.passed = True
        items.append(info)
    return items


def complex_pair(settings: Settings) -> CheckItem:
    spec = PotentialSpec.model_i(REFERENCE_V0, 1.0, math.sqrt(REFERENCE_V0 + 1e-2))
    lower, upper = bound.find_complex_pair(spec, tol=1e-14)

    def fn(b):
        return complex(bound.eigencondition(spec, b))

    independent = bound.newton(fn, upper.beta.conjugate() + 1e-4j, tol=1e-14)
    conj_err = abs(independent - upper.beta.conjugate())
    w1 = bound.build_wavefunction(spec, lower)
    w2 = bound.build_wavefunction(spec, upper)
    cross = abs(bound.eta_inner_product(w1, w2))
    self_ratio = max(abs(bound.eta_inner_product(w1, w1)), abs(bound.eta_inner_product(w2, w2))) / cross
    broken = min(bound.pt_defect(w1), bound.pt_defect(w2))
    real_defect = 0.0
    for s in binding_specs():
        for state in _states(s, settings):
            real_defect = max(real_defect, bound.pt_defect(bound.build_wavefunction(s, state)))
    ok = conj_err < 1e-10 and self_ratio < 1e-8 and broken > 0.1 and real_defect < 1e-8
    worst = max(conj_err / 1e-10, self_ratio / 1e-8, 0.1 / broken, real_defect / 1e-8)
    return CheckItem("complex-pair-interpretation", ok, worst, 1.0,
                     f"conj {conj_err:.1e}, eta self/cross {self_ratio:.1e}, "
                     f"PT(pair) {broken:.3f}, PT(real) {real_defect:.1e}; defect in units of tolerance")


def pole_residuals(settings: Settings) -> CheckItem:
    defect, n = 0.0, 0
    for spec in binding_specs():
        for state in _states(spec, settings):
            defect = max(defect, scattering.transmission_pole_residual(spec, state.beta))
            n += 1
    ref = PotentialSpec.model_i(REFERENCE_V0, 1.0, math.sqrt(REFERENCE_V0 + 1e-2))
    for state in bound.find_complex_pair(ref, tol=1e-14):
        defect = max(defect, scattering.transmission_pole_residual(ref, state.beta))
        n += 1
    return CheckItem("bound-state-poles", defect < 1e-8, defect, 1e-8, f"{n} states")


def figures(settings: Settings) -> CheckItem:
    problems = []
    tables = {}
    for name in sweep.PRESETS:
        first = sweep.emit_figure(name)
        if sweep.emit_figure(name) != first:
            problems.append(f"{name} not deterministic")
        tables[name] = sweep.read_csv(first)
    lam, beta = tables["fig1a"].column("lam"), tables["fig1a"].column("beta")
    present = [b for b in beta if b is not None]
    if any(b2 > b1 for b1, b2 in zip(present, present[1:])):
        problems.append("fig1a not monotone")
    last = max(i for i, b in enumerate(beta) if b is not None)
    if beta[last + 1:] and any(b is not None for b in beta[last + 1:]):
        problems.append("fig1a has a gap")
    if not (lam[last] < 1.0 <= lam[min(last + 1, len(lam) - 1)]):
        problems.append("fig1a does not terminate at lam* = 1")
    end_dev = 0.0
    for name in ("fig1d", "fig2d"):
        row = tables[name].rows[-1]
        end_dev = max(end_dev, abs(row[1]), abs(row[2]))
    if end_dev >= 1e-2:
        problems.append("deviation not small at high k")
    return CheckItem("figure-regeneration", not problems, end_dev, 1e-2,
                     "; ".join(problems) or "8 presets deterministic; fig1a monotone, ends at lam* = 1")


def hermitian_limit(settings: Settings) -> CheckItem:
    defect = 0.0
    for spec in scattering_specs():
        spec = spec.replace(lam=0.0)
        data = _closed(spec, k_grid(spec), settings)
        for side in "LR":
            defect = max(defect, float(np.max(np.abs(scattering.unitarity_deviation(data, side)))))
        defect = max(defect, scattering.unitarity_defect(scattering.s_matrix(data)))
    beta_err = 0.0
    for mu in (0.5, 1.0, 2.0, 3.7):
        states = _states(PotentialSpec.model_ii(mu, 1.0, 0.0), settings)
        beta_err = max(beta_err, abs(states[0].beta.real - mu / 2) if states else math.inf)
    worst = max(defect, beta_err)
    return CheckItem("hermitian-limit", worst < 1e-12, worst, 1e-12,
                     f"unitarity {defect:.1e}, model II beta - mu/2 {beta_err:.1e}")


def model_ii_eigencondition_arbitration(settings: Settings) -> CheckItem:
    """Which printed/resolved reading of the Model II condition reproduces the oracle roots."""
    worst = {"resolved": 0.0, "printed": 0.0}
    for spec in binding_specs():
        if spec.family is not Family.MODEL_II:
            continue
        oracle = _oracle_roots(spec, settings)
        for variant in worst:
            roots = [s.beta.real for s in bound.find_real_bound_states(spec, variant=variant)]
            if len(roots) != len(oracle):
                worst[variant] = math.inf
            else:
                for a, b in zip(roots, oracle):
                    worst[variant] = max(worst[variant], abs(a - b))
    matching = [v for v, d in worst.items() if d < 1e-8]
    chosen = "resolved (1 + e^{-beta a})" if "resolved" in matching else (
        "printed (1 + e^{+beta a})" if matching else "none")
    return CheckItem("model-ii-eigencondition-arbitration", bool(matching), min(worst.values()), 1e-8,
                     f"matches oracle: {chosen}; resolved {worst['resolved']:.1e}, printed {worst['printed']:.1e}")


def model_ii_amplitude_arbitration(settings: Settings) -> CheckItem:
    worst = {"resolved": 0.0, "printed": 0.0}
    for spec in scattering_specs():
        if spec.family is not Family.MODEL_II:
            continue
        k = k_grid(spec)
        odata = oracle_amplitudes(decompose(spec), k, settings.jump_sign)
        for variant in worst:
            worst[variant] = max(worst[variant],
                                 _relative_error(scattering.amplitudes(spec, k, variant), odata))
    matching = [v for v, d in worst.items() if d < 1e-10]
    label = {"resolved": "resolved (rL/rR labels swapped)", "printed": "printed labels"}
    chosen = label[matching[0]] if matching else "none"
    return CheckItem("model-ii-amplitude-arbitration", bool(matching), min(worst.values()), 1e-10,
                     f"matches oracle: {chosen}; resolved {worst['resolved']:.1e}, printed {worst['printed']:.1e}")


ITEMS = (critical_strength_model_i, critical_depth_model_ii, oracle_scattering, oracle_bound_states,
         pseudo_unitarity, transmission_symmetry, perturbative_order, complex_pair, pole_residuals,
         figures, hermitian_limit, model_ii_eigencondition_arbitration, model_ii_amplitude_arbitration)


def run_check(fault: str | None = None, model2_variant: str = "resolved",
              perturbative_series: str = "printed", workers: int | None = None) -> CheckReport:
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; choose from {', '.join(FAULTS)}")
    settings = Settings(fault, model2_variant, perturbative_series)
    workers = sweep.worker_count() if workers is None else workers
    start = time.perf_counter()

    def run(item):
        try:
            result = item(settings)
        except Exception as exc:  # a crashing item is a failing item
            result = CheckItem(item.__name__.replace("_", "-"), False, math.inf, 0.0,
                               f"{type(exc).__name__}: {exc}")
        return result if isinstance(result, list) else [result]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, ITEMS))
    else:
        results = [run(item) for item in ITEMS]
    items = [it for group in results for it in group]
    return CheckReport(items, time.perf_counter() - start,
                       {"fault": fault, "model2_variant": model2_variant,
                        "perturbative_series": perturbative_series})
