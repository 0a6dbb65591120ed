"""Bound states of the two families: eigenconditions, root finding, wavefunctions.

A bound state has energy ``E = -beta^2`` and tails ``exp(beta x)`` on the left
and ``exp(-beta x)`` on the right; it is normalizable when ``Re(beta) > 0``.
"""

from __future__ import annotations

import cmath
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from ._numerics import cos_sinc, exprel, scan_real_roots
from .potentials import Family, PiecewiseSystem, PotentialSpec, decompose

Variant = Literal["resolved", "printed"]

GRID_POINTS = 2048
DEFAULT_TOL = 1e-10


class Kind(enum.Enum):
    REAL = "real"
    COMPLEX_PAIR_MEMBER = "complex-pair-member"


@dataclass(frozen=True)
class BoundState:
    beta: complex
    energy: complex
    kind: Kind
    residual: float


class ConvergenceError(ArithmeticError):
    def __init__(self, message, last_iterate):
        super().__init__(message)
        self.last_iterate = last_iterate


class InvalidStateError(ValueError):
    """The supplied decay constant does not connect decaying tails."""


class DivergentIntegralError(ArithmeticError):
    pass


# -- eigenconditions ---------------------------------------------------------

def eigencondition_model_i(spec: PotentialSpec, beta):
    """Scaled Model I condition ``(q^2 - beta^2 - lam^2) sin(qa)/q - 2 beta cos(qa)``.

    Dividing the textbook form by ``q = sqrt(v0 - beta^2)`` makes it single
    valued and entire in ``beta``; the factor ``a / max(1, v0 a^2, lam^2 a^2)``
    keeps it dimensionless and O(1).
    """
    beta = np.asarray(beta, dtype=complex)
    v0, a, lam = spec.v0, spec.a, spec.lam
    q2 = v0 - beta * beta
    c, s = cos_sinc(q2, a)
    norm = max(1.0, v0 * a * a, lam * lam * a * a)
    return ((q2 - beta * beta - lam * lam) * s - 2 * beta * c) * a / norm


def eigencondition_model_ii(spec: PotentialSpec, beta, variant: Variant = "resolved"):
    """Residual of ``8b^3 - 4 mu b^2 = lam^2 (1 - e^{-ba}) [mu (1 - e^{-ba}) - 2b (1 + X)]``.

    ``variant="printed"`` uses ``X = e^{+ba}`` and is multiplied through by
    ``e^{-ba}`` to avoid overflow; ``variant="resolved"`` uses ``X = e^{-ba}``,
    which is the form the transfer-matrix oracle confirms. Scaled by ``a^3``.
    """
    beta = np.asarray(beta, dtype=complex)
    mu, a, lam = spec.v0, spec.a, spec.lam
    e = np.exp(-beta * a)
    one_minus = -np.expm1(-beta * a)
    if variant == "resolved":
        value = 8 * beta ** 3 - 4 * mu * beta ** 2 - lam * lam * one_minus * (
            mu * one_minus - 2 * beta * (1 + e))
    elif variant == "printed":
        value = (8 * beta ** 3 - 4 * mu * beta ** 2) * e - lam * lam * one_minus * (
            mu * one_minus * e - 2 * beta * (e + 1))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return value * a ** 3


def eigencondition(spec: PotentialSpec, beta, variant: Variant = "resolved"):
    if spec.family is Family.MODEL_I:
        return eigencondition_model_i(spec, beta)
    return eigencondition_model_ii(spec, beta, variant)


# -- real roots --------------------------------------------------------------

def search_window(spec: PotentialSpec) -> tuple[float, float]:
    """``(eps_grid, beta_max)`` for the real scan; empty when ``beta_max <= eps_grid``."""
    eps = 1e-9 / spec.a
    if spec.family is Family.MODEL_I:
        # B > V0 is impossible for the well
        return eps, math.sqrt(spec.v0) - eps
    return eps, spec.v0


def _derivative(fn, beta, h=None):
    h = 1e-7 * max(1.0, abs(beta)) if h is None else h
    return (fn(beta + h) - fn(beta - h)) / (2 * h)


def find_real_bound_states(spec: PotentialSpec, tol=DEFAULT_TOL, variant: Variant = "resolved",
                           n=GRID_POINTS) -> list[BoundState]:
    """All real bound states in the search window, sorted by ascending ``beta``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    eps, beta_max = search_window(spec)

    def fn(b):
        return np.real(eigencondition(spec, b, variant))

    states = []
    for root in scan_real_roots(fn, eps, beta_max, n, tol, merge=1e-9):
        if root <= eps:
            continue
        if root < 10 * eps and abs(_derivative(fn, root, h=eps)) < tol:
            # remnant of the double root at beta = 0
            continue
        value = complex(eigencondition(spec, root, variant))
        states.append(BoundState(complex(root), complex(-root * root), Kind.REAL, abs(value)))
    return states


# -- complex roots -----------------------------------------------------------

@dataclass(frozen=True)
class PerturbativeRoot:
    beta_a: complex
    physical: bool
    pt_broken: bool


def perturbative_roots_model_i(epsilon: float, series: str = "printed") -> list[PerturbativeRoot]:
    """Roots ``beta*a`` near criticality at the reference point ``sqrt(v0 a^2) = pi/2``.

    ``epsilon = v0 a^2 - lam^2 a^2``. ``series="printed"`` is the expansion
    ``-(3/8) eps +/- sqrt(eps/2)``, ``-2``. ``series="rederived"`` expands the same
    cubic ``b^3 + 2 b^2 = eps`` and the full condition consistently:
    ``s - s^2/4 + (5/32) s^3`` with ``s = +/- sqrt(eps/2)``, error O(eps^2), and
    ``-2 + eps/4`` for the cubic's third root (not a root of the full condition).
    """
    s = cmath.sqrt(epsilon / 2)
    if series == "printed":
        pair = [-0.375 * epsilon + s, -0.375 * epsilon - s]
        third = -2.0
    elif series == "rederived":
        pair = [r - r * r / 4 + 5 * r ** 3 / 32 for r in (s, -s)]
        third = -2.0 + epsilon / 4
    else:
        raise ValueError(f"unknown series {series!r}")
    out = []
    for value in (*pair, third):
        value = complex(value)
        complex_root = value.imag != 0
        out.append(PerturbativeRoot(value, value.real > 0, complex_root and value.real > 0))
    return out


def newton(fn, seed: complex, tol=DEFAULT_TOL, max_iter=200, domain=None) -> complex:
    """Damped Newton iteration on an analytic function, central-difference derivative.

    Steps are halved until the residual decreases; with ``domain`` given, an
    iterate that cannot be kept inside it ends the search with
    :class:`ConvergenceError`.
    """
    beta = complex(seed)
    value = complex(fn(beta))
    for _ in range(max_iter):
        h = 1e-7 * max(1.0, abs(beta))
        slope = (complex(fn(beta + h)) - complex(fn(beta - h))) / (2 * h)
        if slope == 0 or not cmath.isfinite(slope):
            raise ConvergenceError("vanishing or non-finite derivative", beta)
        step = value / slope
        damping = 1.0
        while True:
            trial = beta - damping * step
            trial_value = complex(fn(trial))
            inside = domain is None or domain(trial)
            if inside and cmath.isfinite(trial_value) and abs(trial_value) < abs(value):
                break
            damping /= 2
            if damping < 1e-6:
                break
        if not (cmath.isfinite(trial) and cmath.isfinite(trial_value)):
            raise ConvergenceError("iterate left the finite plane", beta)
        if not inside:
            raise ConvergenceError("iterate left the search domain", beta)
        beta, value = trial, trial_value
        if abs(value) < tol and abs(damping * step) <= 1e-13 * max(1.0, abs(beta)):
            return beta
    raise ConvergenceError(f"no convergence after {max_iter} iterations", beta)


def default_seed(spec: PotentialSpec) -> complex:
    """Rederived perturbative estimate of the upper complex root (Model I only)."""
    if spec.family is not Family.MODEL_I:
        raise ValueError("a seed must be supplied for Model II")
    eps = spec.v0 * spec.a ** 2 - spec.lam ** 2 * spec.a ** 2
    roots = perturbative_roots_model_i(eps, series="rederived")
    upper = max(roots[:2], key=lambda r: r.beta_a.imag)
    return upper.beta_a / spec.a


def find_complex_pair(spec: PotentialSpec, tol=DEFAULT_TOL, seed: complex | None = None,
                      variant: Variant = "resolved") -> tuple[BoundState, BoundState]:
    """Converge on a complex root from ``seed`` and verify its conjugate is a root too."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    seed = default_seed(spec) if seed is None else seed

    def fn(b):
        return complex(eigencondition(spec, b, variant))

    # bound states live in Re(beta) > 0; roots beyond it are not normalizable
    beta = newton(fn, seed, tol=tol, domain=lambda b: b.real > 0)
    if abs(beta.imag) <= 1e-12 * max(1.0, abs(beta)):
        raise ValueError(f"converged to a real root {beta.real:.12g}; no complex pair here")
    partner = beta.conjugate()
    partner_residual = abs(fn(partner))
    if partner_residual >= tol:
        raise ConvergenceError("conjugate of the converged root is not a root", beta)
    first = BoundState(beta, -beta * beta, Kind.COMPLEX_PAIR_MEMBER, abs(fn(beta)))
    second = BoundState(partner, -partner * partner, Kind.COMPLEX_PAIR_MEMBER, partner_residual)
    return (first, second) if first.beta.imag < 0 else (second, first)


# -- binding curves ----------------------------------------------------------

def least_bound_beta(spec: PotentialSpec, tol=DEFAULT_TOL, variant: Variant = "resolved"):
    states = find_real_bound_states(spec, tol, variant)
    return states[0].beta.real if states else None


def binding_curve(spec: PotentialSpec, lam_grid: Sequence[float], tol=DEFAULT_TOL,
                  variant: Variant = "resolved", workers: int = 1):
    """``[(lam, beta or None)]`` for the least-bound real state at each strength."""
    lam_grid = [float(x) for x in lam_grid]
    if any(b < a for a, b in zip(lam_grid, lam_grid[1:])):
        raise ValueError("lam_grid must be ascending")

    def one(lam):
        return lam, least_bound_beta(spec.replace(lam=lam), tol, variant)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, lam_grid))
    return [one(lam) for lam in lam_grid]


# -- wavefunctions -----------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """``psi`` on ``[lo, hi]`` through Cauchy data at ``anchor`` and ``kappa2 = -beta^2 - U``."""

    lo: float
    hi: float
    anchor: float
    psi: complex
    dpsi: complex
    kappa2: complex

    def __call__(self, x):
        c, s = cos_sinc(self.kappa2, np.asarray(x, dtype=float) - self.anchor)
        return c * self.psi + s * self.dpsi

    def terms(self):
        """``[(coef, rate)]`` with ``psi = sum coef exp(rate x)`` on this region."""
        gamma = cmath.sqrt(-self.kappa2)
        if abs(gamma) * max(1.0, self.hi - self.lo) < 1e-12:
            raise ValueError("region with vanishing local decay constant has no exponential form")
        plus = 0.5 * (self.psi + self.dpsi / gamma) * cmath.exp(-gamma * self.anchor)
        minus = 0.5 * (self.psi - self.dpsi / gamma) * cmath.exp(gamma * self.anchor)
        return [(plus, gamma), (minus, -gamma)]


@dataclass(frozen=True)
class WaveFunction:
    """Piecewise bound-state solution with ``psi = exp(beta x)`` left of the structure.

    ``regions`` are the finite regions between interfaces; the tails are
    ``exp(beta x)`` and ``right_coef * exp(-beta x)``.
    """

    system: PiecewiseSystem
    beta: complex
    regions: tuple[Region, ...]
    right_coef: complex
    growing_ratio: float = field(default=0.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        xs = self.system.interfaces
        out = np.where(x < xs[0], np.exp(self.beta * x), 0j)
        out = np.where(x >= xs[-1], self.right_coef * np.exp(-self.beta * x), out)
        for reg in self.regions:
            inside = (x >= reg.lo) & (x < reg.hi)
            if np.any(inside):
                out = np.where(inside, reg(x), out)
        return out

    def pieces(self):
        """``[(lo, hi, terms)]`` over the whole line, tails included."""
        xs = self.system.interfaces
        out = [(-math.inf, xs[0], [(1.0 + 0j, self.beta)])]
        out += [(r.lo, r.hi, r.terms()) for r in self.regions]
        out.append((xs[-1], math.inf, [(self.right_coef, -self.beta)]))
        return out


def build_wavefunction(spec_or_system, state: BoundState, *, tail_tol=1e-8) -> WaveFunction:
    """Propagate the decaying left tail through the structure.

    The ratio of growing to decaying tail amplitude on the right, referred back
    to the centre of the structure, must stay below ``tail_tol``; this
    re-verifies the eigenvalue. (At the right edge itself the ratio carries a
    factor ``exp(beta * width)`` that turns rounding in ``beta`` into a spurious
    failure for deep states.) At ``beta = 0`` the right tail must be flat instead.
    """
    system = spec_or_system if isinstance(spec_or_system, PiecewiseSystem) else decompose(spec_or_system)
    beta = complex(state.beta)
    xs, us, ss = system.interfaces, system.region_potentials, system.delta_strengths
    psi = cmath.exp(beta * xs[0])
    dpsi = beta * psi
    regions = []
    for j, x in enumerate(xs):
        if j > 0:
            kappa2 = -beta * beta - us[j]
            reg = Region(xs[j - 1], x, xs[j - 1], psi, dpsi, kappa2)
            regions.append(reg)
            c, s = cos_sinc(kappa2, x - xs[j - 1])
            c, s = complex(c), complex(s)
            psi, dpsi = c * psi + s * dpsi, -kappa2 * s * psi + c * dpsi
        dpsi = dpsi + ss[j] * psi
    if beta == 0:
        growing = abs(dpsi) * (xs[-1] - xs[0]) / max(abs(psi), 1e-300)
        right = psi
    else:
        grow = abs(beta * psi + dpsi)
        decay = abs(beta * psi - dpsi)
        width = xs[-1] - xs[0]
        growing = grow / decay * math.exp(-beta.real * width) if decay > 0 else math.inf
        right = 0.5 * (psi - dpsi / beta) * cmath.exp(beta * xs[-1])
    if not growing < tail_tol:
        raise InvalidStateError(
            f"beta={beta:.12g} leaves a growing right tail (ratio {growing:.3g}); stale or invalid state")
    return WaveFunction(system, beta, tuple(regions), right, growing)


# -- inner products ------------------------------------------------------------

def _integrate_exp(rate: complex, lo: float, hi: float) -> complex:
    if lo == -math.inf and hi == math.inf:
        raise DivergentIntegralError("exponential integrated over the whole line")
    if lo == -math.inf:
        if rate.real <= 0:
            raise DivergentIntegralError("left tail does not decay")
        return cmath.exp(rate * hi) / rate
    if hi == math.inf:
        if rate.real >= 0:
            raise DivergentIntegralError("right tail does not decay")
        return -cmath.exp(rate * lo) / rate
    w = hi - lo
    return cmath.exp(rate * lo) * w * complex(exprel(rate * w))


def _mirror_pieces(wf: WaveFunction):
    """Pieces of ``x -> psi(-x)``, aligned with ``wf.pieces()`` for symmetric systems."""
    out = []
    for lo, hi, terms in reversed(wf.pieces()):
        out.append((-hi, -lo, [(c, -r) for c, r in terms]))
    return out


def _check_symmetric(system: PiecewiseSystem):
    xs = np.array(system.interfaces)
    if not np.allclose(xs, -xs[::-1], rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(xs)))):
        raise ValueError("parity products need interfaces symmetric about x = 0")


def _product_integral(left, right, conj_left: bool) -> complex:
    """``sum over pieces of int f(x) g(x) dx`` with f optionally conjugated."""
    total = 0j
    for (lo, hi, fterms), (_, _, gterms) in zip(left, right):
        for c1, r1 in fterms:
            if conj_left:
                c1, r1 = c1.conjugate(), r1.conjugate()
            for c2, r2 in gterms:
                coef = c1 * c2
                if coef != 0:
                    total += coef * _integrate_exp(r1 + r2, lo, hi)
    return total


def _require_decay(*wfs: WaveFunction):
    for wf in wfs:
        if not wf.beta.real > 0:
            raise DivergentIntegralError(f"beta={wf.beta:.6g} has non-decaying tails")


def eta_inner_product(psi1: WaveFunction, psi2: WaveFunction) -> complex:
    """Parity-metric product ``int conj(psi1(x)) psi2(-x) dx``, in closed form."""
    if psi1.system != psi2.system:
        raise ValueError("wavefunctions live on different systems")
    _check_symmetric(psi1.system)
    _require_decay(psi1, psi2)
    return _product_integral(psi1.pieces(), _mirror_pieces(psi2), conj_left=True)


def norm_squared(psi: WaveFunction) -> float:
    _require_decay(psi)
    return _product_integral(psi.pieces(), psi.pieces(), conj_left=True).real


def _merge(terms, scale):
    merged: list[list[complex]] = []
    for c, r in terms:
        for m in merged:
            if abs(m[1] - r) <= 1e-10 * scale:
                m[0] += c
                break
        else:
            merged.append([c, r])
    return [(c, r) for c, r in merged]


def pt_defect(psi: WaveFunction) -> float:
    """``min over |c| = 1 of ||conj(psi(-x)) - c psi(x)|| / ||psi||``.

    The optimal phase follows from ``int psi(x) psi(-x) dx``; the distance is
    integrated from the merged difference coefficients so a PT-symmetric state
    gives a defect at rounding level rather than ``sqrt(eps)``.
    """
    _check_symmetric(psi.system)
    _require_decay(psi)
    own = psi.pieces()
    overlap = _product_integral(own, _mirror_pieces(psi), conj_left=False)
    phase = overlap.conjugate() / abs(overlap) if abs(overlap) > 0 else 1.0
    diff = []
    for (lo, hi, terms), (_, _, mterms) in zip(own, _mirror_pieces(psi)):
        pt_terms = [(c.conjugate(), r.conjugate()) for c, r in mterms]
        scale = max(1.0, *(abs(r) for _, r in terms))
        combined = pt_terms + [(-phase * c, r) for c, r in terms]
        diff.append((lo, hi, _merge(combined, scale)))
    distance = _product_integral(diff, diff, conj_left=True).real
    return math.sqrt(max(distance, 0.0) / norm_squared(psi))
