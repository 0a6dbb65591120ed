"""The two P-pseudo-Hermitian potential families in reduced units (hbar^2/2m = 1).

Model I is an attractive square well of depth ``v0`` and width ``a`` with a pair
of imaginary delta spikes ``-i*lam`` at ``-a/2`` and ``+i*lam`` at ``+a/2``.
Model II replaces the well with an attractive delta ``-v0`` at the origin.

A delta of reduced strength ``s`` at ``x0`` imposes the jump
``psi'(x0+) - psi'(x0-) = s * psi(x0)``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


class Family(enum.Enum):
    MODEL_I = "I"
    MODEL_II = "II"

    @classmethod
    def parse(cls, value: "str | Family") -> "Family":
        if isinstance(value, Family):
            return value
        key = str(value).strip().upper().replace("MODEL", "").strip("_- ")
        key = {"1": "I", "2": "II"}.get(key, key)
        for member in cls:
            if member.value == key:
                return member
        raise ValueError(f"unknown potential family {value!r}; use I or II")


@dataclass(frozen=True)
class PotentialSpec:
    """One member of a family.

    ``v0`` is the reduced depth (1/length^2 for Model I, 1/length for Model II),
    ``a`` the well width or outer-delta separation, ``lam`` the reduced
    imaginary strength. A negative ``lam`` describes the mirror image of the
    system with ``|lam|``; it is stored as ``|lam|``, so reflection labels of
    the result refer to the mirrored system (``rL`` and ``rR`` swap).
    """

    family: Family
    v0: float
    a: float
    lam: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        for name in ("v0", "a", "lam"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.a <= 0:
            raise ValueError(f"range a must be positive, got {self.a}")
        if self.v0 < 0:
            raise ValueError(f"depth v0 must be non-negative, got {self.v0}")
        if self.lam < 0:
            log.warning("lam=%g normalized to %g; rL and rR refer to the mirrored system",
                        self.lam, -self.lam)
            object.__setattr__(self, "lam", -self.lam)

    @classmethod
    def model_i(cls, v0, a, lam=0.0) -> "PotentialSpec":
        return cls(Family.MODEL_I, v0, a, lam)

    @classmethod
    def model_ii(cls, mu, a, lam=0.0) -> "PotentialSpec":
        return cls(Family.MODEL_II, mu, a, lam)

    def replace(self, **changes) -> "PotentialSpec":
        fields = {"family": self.family, "v0": self.v0, "a": self.a, "lam": self.lam}
        fields.update(changes)
        return PotentialSpec(**fields)


@dataclass(frozen=True)
class PiecewiseSystem:
    """Constant-potential regions separated by interfaces carrying delta spikes.

    ``region_potentials[j]`` holds between ``interfaces[j-1]`` and
    ``interfaces[j]``; the two outermost entries are the free asymptotic regions.
    """

    interfaces: tuple[float, ...]
    region_potentials: tuple[complex, ...]
    delta_strengths: tuple[complex, ...]

    def __post_init__(self):
        xs = tuple(float(x) for x in self.interfaces)
        us = tuple(complex(u) for u in self.region_potentials)
        ss = tuple(complex(s) for s in self.delta_strengths)
        if not xs:
            raise ValueError("a piecewise system needs at least one interface")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("interfaces must be strictly increasing")
        if len(us) != len(xs) + 1 or len(ss) != len(xs):
            raise ValueError("need n+1 region potentials and n delta strengths for n interfaces")
        if us[0] != 0 or us[-1] != 0:
            raise ValueError("outermost regions must be free (zero potential)")
        object.__setattr__(self, "interfaces", xs)
        object.__setattr__(self, "region_potentials", us)
        object.__setattr__(self, "delta_strengths", ss)

    @property
    def widths(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.interfaces, self.interfaces[1:]))

    def mirrored(self) -> "PiecewiseSystem":
        """Apply x -> -x and complex conjugation (the P-pseudo-Hermitian partner)."""
        return PiecewiseSystem(
            tuple(-x for x in reversed(self.interfaces)),
            tuple(np.conj(u) for u in reversed(self.region_potentials)),
            tuple(np.conj(s) for s in reversed(self.delta_strengths)),
        )

    def is_p_pseudo_hermitian(self, atol=0.0) -> bool:
        """True when reflecting positions and conjugating potentials maps the system onto itself."""
        other = self.mirrored()
        return (np.allclose(self.interfaces, other.interfaces, rtol=0, atol=atol)
                and np.allclose(self.region_potentials, other.region_potentials, rtol=0, atol=atol)
                and np.allclose(self.delta_strengths, other.delta_strengths, rtol=0, atol=atol))


def decompose(spec: PotentialSpec) -> PiecewiseSystem:
    half = spec.a / 2
    if spec.family is Family.MODEL_I:
        return PiecewiseSystem((-half, half), (0.0, -spec.v0, 0.0), (-1j * spec.lam, 1j * spec.lam))
    return PiecewiseSystem((-half, 0.0, half), (0.0, 0.0, 0.0, 0.0),
                           (-1j * spec.lam, -spec.v0, 1j * spec.lam))


def recompose(system: PiecewiseSystem) -> PotentialSpec:
    """Inverse of :func:`decompose` for systems of either family."""
    xs, us, ss = system.interfaces, system.region_potentials, system.delta_strengths
    if len(xs) == 2:
        a = xs[1] - xs[0]
        return PotentialSpec(Family.MODEL_I, -us[1].real, a, ss[1].imag)
    if len(xs) == 3:
        a = xs[2] - xs[0]
        return PotentialSpec(Family.MODEL_II, -ss[1].real, a, ss[2].imag)
    raise ValueError("system does not belong to a supported family")


class NoCriticalStrength(ValueError):
    """Model II with v0*a >= 4: every imaginary strength leaves a bound state."""


def critical_imaginary_strength(spec: PotentialSpec) -> float:
    """Imaginary strength at which a state reaches zero binding.

    For Model I with ``sqrt(v0) a < pi/2`` the least-bound state disappears
    there; beyond ``pi/2`` a new shallow state emerges instead.
    """
    if spec.family is Family.MODEL_I:
        return math.sqrt(spec.v0)
    mu, a = spec.v0, spec.a
    if mu * a >= 4:
        raise NoCriticalStrength(f"mu*a = {mu * a:g} >= 4 has no finite critical strength")
    return 2 * math.sqrt(mu / (a * (4 - mu * a)))


def critical_depth(family, lam: float, a: float) -> float:
    """Depth at which a zero-binding state crosses threshold for strength ``lam``.

    For narrow structures (e.g. ``lam = a = 1``) this is the minimum depth that
    still binds; for wider ones the crossing state can appear on the other side.
    """
    family = Family.parse(family)
    if lam < 0 or a <= 0:
        raise ValueError("need lam >= 0 and a > 0")
    if family is Family.MODEL_I:
        return lam * lam
    return 4 * lam * lam * a / (4 + lam * lam * a * a)
