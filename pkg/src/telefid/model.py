"""Closed-form primitives of the correlated-Gaussian record-noise model.

The teleporter is abstracted to two scalar noise channels: the Bell record
is the input displacement plus circular Gaussian noise ``n`` of variance
``V_n``, and the residual displacement error on the output is
``kappa * n + eps`` with ``eps`` an independent circular Gaussian of
variance ``V_eps``.  Everything downstream (profiles, ensemble moments,
sweeps) is built from the small set of closed forms collected here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "SurrogateParams",
    "AcceptAll",
    "MbNla",
    "FilterSpec",
    "PriorSpec",
    "AdditiveNoiseBaseline",
    "filter_weight",
    "conditional_overlap",
    "deterministic_baseline",
    "additive_noise_fidelity",
    "noise_density",
]


@dataclass(frozen=True)
class SurrogateParams:
    """Physical noise model: record noise V_n, residual noise V_eps, correlation kappa.

    Only ``kappa**2`` enters any formula, so the sign of ``kappa`` is
    irrelevant; ``kappa = 0`` is the regime in which filtering the record
    cannot change the conditional fidelity.
    """

    V_n: float
    V_eps: float
    kappa: float

    def __post_init__(self):
        if not (self.V_n >= 0.0):
            raise ValueError(f"V_n must be >= 0, got {self.V_n}")
        if not (self.V_eps >= 0.0):
            raise ValueError(f"V_eps must be >= 0, got {self.V_eps}")
        if not math.isfinite(self.kappa):
            raise ValueError(f"kappa must be finite, got {self.kappa}")


@dataclass(frozen=True)
class AcceptAll:
    """Deterministic control: every Bell record is accepted (weight 1)."""

    def weight_abs(self, abs_m):
        return np.ones_like(np.asarray(abs_m, dtype=float))


@dataclass(frozen=True)
class MbNla:
    """Bounded noiseless-linear-amplification filter on the Bell record.

    Weight is ``exp((1 - 1/g^2) * (|m|^2 - m_c^2))`` inside the hard
    cut-off disk ``|m| <= m_c`` and zero outside, so it always lies in
    [0, 1] and can be read as an accept probability.
    """

    g: float
    m_c: float

    def __post_init__(self):
        if not (self.g > 1.0):
            raise ValueError(f"MbNla gain must satisfy g > 1, got {self.g}")
        if not (self.m_c > 0.0):
            raise ValueError(f"MbNla cut-off must satisfy m_c > 0, got {self.m_c}")

    @property
    def beta(self) -> float:
        """Exponential tilt coefficient 1 - 1/g^2, in (0, 1)."""
        return 1.0 - 1.0 / (self.g * self.g)

    def weight_abs(self, abs_m):
        """Vectorized weight as a function of |m| (exponent evaluated once)."""
        abs_m = np.asarray(abs_m, dtype=float)
        expo = self.beta * (abs_m * abs_m - self.m_c * self.m_c)
        out = np.exp(np.minimum(expo, 0.0))
        return np.where(abs_m <= self.m_c, out, 0.0)


FilterSpec = Union[AcceptAll, MbNla]


@dataclass(frozen=True)
class PriorSpec:
    """Gaussian ensemble of coherent-state displacements; sigma^2 is the mean input energy."""

    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0.0):
            raise ValueError(f"prior width must satisfy sigma > 0, got {self.sigma}")

    def density(self, abs_alpha):
        """Density against the flat complex-plane measure."""
        abs_alpha = np.asarray(abs_alpha, dtype=float)
        s2 = self.sigma * self.sigma
        return np.exp(-abs_alpha * abs_alpha / s2) / (math.pi * s2)


@dataclass(frozen=True)
class AdditiveNoiseBaseline:
    """Ideal deterministic random-displacement channel with added noise nu.

    ``nu = exp(-2 r)`` for squeezing ``r >= 0`` lands nu in (0, 1]; the
    fidelity it induces is amplitude independent.
    """

    nu: float

    def __post_init__(self):
        if not (self.nu >= 0.0):
            raise ValueError(f"added noise must satisfy nu >= 0, got {self.nu}")


def filter_weight(m: complex, filt: FilterSpec) -> float:
    """Acceptance weight of a Bell record ``m`` in [0, 1].

    Depends on ``m`` only through ``|m|``; the exponent is formed first and
    exponentiated once so large cut-offs never overflow.
    """
    return float(filt.weight_abs(abs(m)))


def conditional_overlap(n: complex, params: SurrogateParams) -> float:
    """Fidelity of a run with record noise ``n``, averaged over the independent error.

    Equals ``exp(-kappa^2 |n|^2 / (1 + V_eps)) / (1 + V_eps)``.
    """
    c = 1.0 + params.V_eps
    k2 = params.kappa * params.kappa
    return math.exp(-k2 * abs(n) ** 2 / c) / c


def deterministic_baseline(params: SurrogateParams) -> float:
    """Flat accept-all fidelity ``1 / (1 + V_eps + kappa^2 V_n)``."""
    return 1.0 / (1.0 + params.V_eps + params.kappa * params.kappa * params.V_n)


def additive_noise_fidelity(baseline: AdditiveNoiseBaseline) -> float:
    """Amplitude-independent fidelity ``1 / (1 + nu)`` of the additive-noise channel."""
    return 1.0 / (1.0 + baseline.nu)


def noise_density(n: complex, V_n: float) -> float:
    """Circular complex Gaussian density of the record noise; rejects V_n = 0."""
    if not (V_n > 0.0):
        raise ValueError(f"noise density needs V_n > 0, got {V_n}")
    return math.exp(-abs(n) ** 2 / V_n) / (math.pi * V_n)
