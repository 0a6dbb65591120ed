"""Closed-form transmission and reflection amplitudes and S-matrix diagnostics.

Channel conventions: ``R`` labels a right-moving wave ``exp(ikx)`` and ``L`` a
left-moving one, so ``tR, rR`` belong to a beam incident from the left and
``tL, rL`` to a beam incident from the right. All phases are referenced to
``x = 0``. The S-matrix is laid out as ``[[tR, rL], [rR, tL]]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ._numerics import cos_sinc
from .potentials import Family, PotentialSpec

# parity in the (R, L) channel basis
PARITY = np.array([[0.0, 1.0], [1.0, 0.0]])

Variant = Literal["resolved", "printed"]


@dataclass(frozen=True)
class ScatteringData:
    """Amplitudes at one wavenumber or a grid of wavenumbers (array fields)."""

    k: np.ndarray
    tL: np.ndarray
    tR: np.ndarray
    rL: np.ndarray
    rR: np.ndarray

    def t(self, side: str):
        return self.tL if side == "L" else self.tR

    def r(self, side: str):
        return self.rL if side == "L" else self.rR


def _check_k(k):
    k = np.asarray(k, dtype=float)
    if np.any(~(k > 0)):
        raise ValueError("wavenumber k must be positive (k = 0 is a branch point)")
    return k


def model_i_denominator(v0, a, lam, k):
    """``D / q`` for Model I, entire in ``k`` (``q = sqrt(v0 + k^2)``)."""
    k = np.asarray(k, dtype=complex)
    q2 = v0 + k * k
    c, s = cos_sinc(q2, a)
    return 2 * k * c - 1j * (q2 + k * k - lam * lam) * s


def model_i_amplitudes(v0, a, lam, k):
    """Model I amplitudes as plain arrays ``(t, rL, rR)``; accepts any real ``lam``."""
    k = np.asarray(k, dtype=complex)
    q2 = v0 + k * k
    _, s = cos_sinc(q2, a)
    den = model_i_denominator(v0, a, lam, k)
    phase = np.exp(-1j * k * a)
    t = 2 * k * phase / den
    rL = 1j * (q2 - (k + lam) ** 2) * s * phase / den
    rR = 1j * (q2 - (k - lam) ** 2) * s * phase / den
    return t, rL, rR


def model_ii_denominator(mu, a, lam, k):
    k = np.asarray(k, dtype=complex)
    g = mu / (2 * k)
    e = np.exp(1j * k * a)
    return (1 - 1j * g) + (lam / (2 * k)) ** 2 * (-(1 - 1j * g) - 2j * g * e + (1 + 1j * g) * e * e)


def model_ii_amplitudes(mu, a, lam, k, variant: Variant = "resolved"):
    """Model II amplitudes ``(t, rL, rR)``.

    The printed reflection formulas carry the opposite left/right labelling to
    the channel convention used for Model I (equivalently ``lam -> -lam``);
    ``variant="resolved"`` swaps them so both families share one convention,
    ``variant="printed"`` returns them as printed. The "c.c." term is the
    conjugate taken at real ``k``, continued analytically.
    """
    k = np.asarray(k, dtype=complex)
    g = mu / (2 * k)
    h = lam / (2 * k)
    e = np.exp(1j * k * a)
    den = model_ii_denominator(mu, a, lam, k)
    bracket = (1 + 1j * g) * h * e - (1 - 1j * g) * h / e
    num_l = 1j * g * (1 - 2 * h + 2 * h * h) + (1 - h) * bracket
    num_r = 1j * g * (1 + 2 * h + 2 * h * h) - (1 + h) * bracket
    t = 1 / den
    if variant == "printed":
        return t, num_l / den, num_r / den
    if variant != "resolved":
        raise ValueError(f"unknown variant {variant!r}")
    return t, num_r / den, num_l / den


def _pack(k, t, rL, rR):
    # same object for both transmissions: tL == tR bit for bit
    return ScatteringData(k=k, tL=t, tR=t, rL=rL, rR=rR)


def amplitudes_model_i(spec: PotentialSpec, k) -> ScatteringData:
    if spec.family is not Family.MODEL_I:
        raise ValueError("amplitudes_model_i needs a Model I spec")
    k = _check_k(k)
    return _pack(k, *model_i_amplitudes(spec.v0, spec.a, spec.lam, k))


def amplitudes_model_ii(spec: PotentialSpec, k, variant: Variant = "resolved") -> ScatteringData:
    if spec.family is not Family.MODEL_II:
        raise ValueError("amplitudes_model_ii needs a Model II spec")
    k = _check_k(k)
    return _pack(k, *model_ii_amplitudes(spec.v0, spec.a, spec.lam, k, variant))


def amplitudes(spec: PotentialSpec, k, variant: Variant = "resolved") -> ScatteringData:
    if spec.family is Family.MODEL_I:
        return amplitudes_model_i(spec, k)
    return amplitudes_model_ii(spec, k, variant)


def s_matrix(data: ScatteringData) -> np.ndarray:
    """Stack of 2x2 S-matrices, shape ``k.shape + (2, 2)``."""
    row0 = np.stack(np.broadcast_arrays(data.tR, data.rL), axis=-1)
    row1 = np.stack(np.broadcast_arrays(data.rR, data.tL), axis=-1)
    return np.stack([row0, row1], axis=-2).astype(complex)


def _dagger(S):
    return np.conj(np.swapaxes(S, -1, -2))


def pseudo_unitarity_defect(S) -> float:
    """Max-norm of ``P^-1 S^dagger P S - I`` over a stack of S-matrices."""
    S = np.asarray(S, dtype=complex)
    residual = PARITY @ _dagger(S) @ PARITY @ S - np.eye(2)
    return float(np.max(np.abs(residual)))


def unitarity_defect(S) -> float:
    """Max-norm of ``S^dagger S - I``; zero only for real potentials."""
    S = np.asarray(S, dtype=complex)
    return float(np.max(np.abs(_dagger(S) @ S - np.eye(2))))


def phase_defects(data: ScatteringData) -> tuple[float, float]:
    """Largest ``|Re(r* t)|`` for each incidence side; zero means a pi/2 phase offset."""
    left = np.max(np.abs(np.real(np.conj(data.rL) * data.tL)))
    right = np.max(np.abs(np.real(np.conj(data.rR) * data.tR)))
    return float(left), float(right)


def unitarity_deviation(data: ScatteringData, side: str):
    """``|r|^2 + |t|^2 - 1`` for the given incidence side (``"L"`` or ``"R"``)."""
    if side not in ("L", "R"):
        raise ValueError("side must be 'L' or 'R'")
    return np.abs(data.r(side)) ** 2 + np.abs(data.t(side)) ** 2 - 1


def transmission_pole_residual(spec: PotentialSpec, beta) -> float:
    """Magnitude of the scaled transmission denominator at ``k = i beta``.

    Scaled exactly like the eigencondition of the family, so it vanishes at
    every bound state, complex-pair members included.
    """
    k = 1j * np.asarray(beta, dtype=complex)
    a = spec.a
    if spec.family is Family.MODEL_I:
        norm = max(1.0, spec.v0 * a * a, spec.lam * spec.lam * a * a)
        value = model_i_denominator(spec.v0, a, spec.lam, k) * a / norm
    else:
        value = model_ii_denominator(spec.v0, a, spec.lam, k) * 8j * k ** 3 * a ** 3
    return float(np.max(np.abs(value)))
