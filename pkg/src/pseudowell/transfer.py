"""Transfer-matrix ground truth for arbitrary piecewise systems.

Two bases are used. Inside the structure the state is the Cauchy pair
``(psi, psi')``: a constant region of local wavenumber ``kappa`` propagates it
with ``[[cos kw, sin(kw)/k], [-k sin kw, cos kw]]`` and a delta of strength
``s`` with ``[[1, 0], [s, 1]]``. Both are unimodular and entire in ``kappa^2``,
so no branch of the square root has to be chosen. At the free ends the pair is
converted to plane-wave coefficients ``(A, B)`` of ``A exp(ikx) + B exp(-ikx)``
with phases referenced to ``x = 0``.

The composed matrix ``M`` maps left coefficients to right coefficients, which
gives ``tR = 1/M22``, ``rR = -M21/M22``, ``tL = det M / M22`` and
``rL = M12/M22``.
"""

from __future__ import annotations

import numpy as np

from ._numerics import cos_sinc, scaled_cos_sinc, scan_real_roots
from .potentials import PiecewiseSystem
from .scattering import ScatteringData


class DegenerateSystemError(ArithmeticError):
    """M22 vanished at a real wavenumber."""


def _mat(a, b, c, d):
    a, b, c, d = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a, b, c, d)))
    return np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2)


def region_matrix(k_local, x_from, x_to):
    """Propagator of ``(psi, psi')`` across a constant region of local wavenumber ``k_local``."""
    w = x_to - x_from
    if w < 0:
        raise ValueError("x_to must not precede x_from")
    k_local = np.asarray(k_local, dtype=complex)
    c, s = cos_sinc(k_local * k_local, w)
    return _mat(c, s, -(k_local * k_local) * s, c)


def jump_matrix(strength, jump_sign=1.0):
    """Cauchy-pair factor of a delta spike: ``psi' -> psi' + s psi``."""
    s = jump_sign * np.asarray(strength, dtype=complex)
    return _mat(1.0, 0.0, s, 1.0)


def plane_wave_basis(k, x):
    """Maps plane-wave coefficients at wavenumber ``k`` to ``(psi, psi')`` at ``x``."""
    k = np.asarray(k, dtype=complex)
    e = np.exp(1j * k * x)
    return _mat(e, 1 / e, 1j * k * e, -1j * k / e)


def _plane_wave_basis_inv(k, x):
    k = np.asarray(k, dtype=complex)
    e = np.exp(1j * k * x)
    f = 1 / (2j * k)
    return _mat(f * 1j * k / e, f / e, f * 1j * k * e, -f * e)


def delta_matrix(strength, k, x0, jump_sign=1.0):
    """Plane-wave-basis transfer matrix of a delta spike at ``x0`` in free space."""
    k = np.asarray(k, dtype=complex)
    if np.any(k == 0):
        raise ValueError("delta_matrix needs k != 0")
    sig = jump_sign * np.asarray(strength, dtype=complex) / (2j * k)
    e2 = np.exp(2j * k * x0)
    return _mat(1 + sig, sig / e2, -sig * e2, 1 - sig)


def system_factors(system: PiecewiseSystem, k, jump_sign=1.0):
    """Unimodular plane-wave-basis factors of ``system``, left to right."""
    k = np.asarray(k, dtype=complex)
    xs, us, ss = system.interfaces, system.region_potentials, system.delta_strengths
    factors = []
    for j, x in enumerate(xs):
        if j > 0:
            inner = region_matrix(np.sqrt(k * k - us[j]), xs[j - 1], x)
            factors.append(_plane_wave_basis_inv(k, x) @ inner @ plane_wave_basis(k, xs[j - 1]))
        factors.append(delta_matrix(ss[j], k, x, jump_sign))
    return factors


def system_matrix(system: PiecewiseSystem, k, jump_sign=1.0):
    M = None
    for f in system_factors(system, k, jump_sign):
        M = f if M is None else f @ M
    return M


def oracle_amplitudes(system: PiecewiseSystem, k, jump_sign=1.0) -> ScatteringData:
    k_arr = np.asarray(k, dtype=float)
    if np.any(~(k_arr > 0)):
        raise ValueError("oracle amplitudes need k > 0")
    M = system_matrix(system, k_arr, jump_sign)
    m22 = M[..., 1, 1]
    if np.any(np.abs(m22) < 1e-14):
        raise DegenerateSystemError("M22 vanishes at a real wavenumber")
    det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    return ScatteringData(k=k_arr, tL=det / m22, tR=1 / m22,
                          rL=M[..., 0, 1] / m22, rR=-M[..., 1, 0] / m22)


def oracle_bound_condition(system: PiecewiseSystem, beta, jump_sign=1.0):
    """Scaled ``M22`` at ``k = i beta``; vanishes exactly at bound states.

    The decaying left solution ``exp(beta (x - x_first))`` is carried through the
    structure as a Cauchy pair, each region's exponential growth divided out by
    a positive factor. The result is ``(beta psi + psi') / 2`` at the last
    interface, i.e. ``M22`` times ``beta exp(beta * width)`` and positive factors;
    for real ``beta`` it keeps the phase of ``M22``.
    """
    beta = np.asarray(beta, dtype=complex)
    xs, us, ss = system.interfaces, system.region_potentials, system.delta_strengths
    psi = np.ones_like(beta)
    dpsi = beta.copy()
    for j, x in enumerate(xs):
        if j > 0:
            # local kappa^2 = k^2 - U with k = i beta
            z = -beta * beta - us[j]
            c, s, _ = scaled_cos_sinc(z, x - xs[j - 1])
            psi, dpsi = c * psi + s * dpsi, -z * s * psi + c * dpsi
        dpsi = dpsi + jump_sign * ss[j] * psi
        norm = np.maximum(np.abs(psi), np.abs(dpsi))
        norm = np.where(norm > 0, norm, 1.0)
        # positive rescaling keeps zeros and phase; stops growth across many spikes
        if j < len(xs) - 1:
            psi, dpsi = psi / norm, dpsi / norm
    return 0.5 * (beta * psi + dpsi)


def oracle_real_bound_states(system: PiecewiseSystem, beta_max, *, n=2048, beta_min=None,
                             tol=1e-9, jump_sign=1.0):
    """Real decay constants of ``system`` in ``(beta_min, beta_max)`` from the oracle alone.

    On the real axis the condition is real up to a constant global phase for
    P-pseudo-Hermitian systems; that phase is estimated from the grid and
    removed before bracketing.
    """
    width = system.interfaces[-1] - system.interfaces[0] or 1.0
    lo = beta_min if beta_min is not None else 1e-9 / width
    if beta_max <= lo:
        return []
    grid = np.linspace(lo, beta_max, n)
    values = oracle_bound_condition(system, grid, jump_sign)
    phase = np.exp(-0.5j * np.angle(np.sum(values * values)))

    def real_part(b):
        return np.real(phase * oracle_bound_condition(system, b, jump_sign))

    roots = scan_real_roots(real_part, lo, beta_max, n, tol=np.inf)
    return [r for r in roots if abs(oracle_bound_condition(system, r, jump_sign)) < tol]
