"""Analytic tensor fields assembled from monomial-times-radial-profile terms.

Every term has the closed form

    coeff * (x - center)^expo * F(|x - center|)

sitting in one slot of a rank-0/1/2 tensor, with F given as a jet-valued
profile.  Differentiation stays inside this family, so first and second
derivatives are exact to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .jets import Jet

ProfileFn = Callable[[np.ndarray], Jet]


@dataclass(frozen=True)
class Term:
    slot: tuple[int, ...]            # () scalar, (i,) vector, (i, j) bilinear form
    coeff: float
    expo: tuple[int, ...]            # monomial exponents, one per coordinate
    profile: ProfileFn | None = None  # None means the constant profile 1
    center: tuple[float, ...] | None = None


def _mono(x: np.ndarray, expo: Sequence[int]) -> np.ndarray:
    out = np.ones(x.shape[0])
    for i, a in enumerate(expo):
        if a == 1:
            out = out * x[:, i]
        elif a > 1:
            out = out * x[:, i] ** a
    return out


def _mono_d(x: np.ndarray, expo: Sequence[int], k: int) -> np.ndarray:
    a = expo[k]
    if a == 0:
        return np.zeros(x.shape[0])
    lowered = list(expo)
    lowered[k] -= 1
    return a * _mono(x, lowered)


def _mono_dd(x: np.ndarray, expo: Sequence[int], k: int, l: int) -> np.ndarray:
    if k == l:
        a = expo[k]
        if a < 2:
            return np.zeros(x.shape[0])
        lowered = list(expo)
        lowered[k] -= 2
        return a * (a - 1) * _mono(x, lowered)
    if expo[k] == 0 or expo[l] == 0:
        return np.zeros(x.shape[0])
    lowered = list(expo)
    lowered[k] -= 1
    lowered[l] -= 1
    return expo[k] * expo[l] * _mono(x, lowered)


@dataclass
class SeparableField:
    """Sum of separable terms forming a rank-0/1/2 field on R^n."""

    dim: int
    rank: int
    terms: list[Term] = field(default_factory=list)

    def _shifted(self, pts: np.ndarray, term: Term) -> np.ndarray:
        if term.center is None:
            return pts
        return pts - np.asarray(term.center)

    def _radial(self, x: np.ndarray, term: Term):
        rho = np.sqrt(np.einsum("qi,qi->q", x, x))
        if np.any(rho < 1e-12):
            raise DomainError("field evaluated at a profile center")
        return rho, term.profile(rho)

    def _out(self, npts: int, extra: int) -> np.ndarray:
        return np.zeros((npts,) + (self.dim,) * (extra + self.rank))

    def _slot(self, out: np.ndarray, term: Term, lead: tuple) -> tuple:
        return (slice(None),) + lead + term.slot

    def value(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = self._out(pts.shape[0], 0)
        for t in self.terms:
            x = self._shifted(pts, t)
            val = t.coeff * _mono(x, t.expo)
            if t.profile is not None:
                val = val * self._radial(x, t)[1].v
            out[self._slot(out, t, ())] += val
        return out

    def d1(self, pts: np.ndarray) -> np.ndarray:
        """Partial derivatives; leading tensor axis k is the derivative index."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        n = self.dim
        out = self._out(pts.shape[0], 1)
        for t in self.terms:
            x = self._shifted(pts, t)
            m = _mono(x, t.expo)
            if t.profile is None:
                for k in range(n):
                    out[self._slot(out, t, (k,))] += t.coeff * _mono_d(x, t.expo, k)
                continue
            rho, F = self._radial(x, t)
            theta = x / rho[:, None]
            for k in range(n):
                out[self._slot(out, t, (k,))] += t.coeff * (
                    _mono_d(x, t.expo, k) * F.v + m * F.d * theta[:, k]
                )
        return out

    def d2(self, pts: np.ndarray) -> np.ndarray:
        """Second partials; leading axes (k, l) are the derivative indices."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        n = self.dim
        out = self._out(pts.shape[0], 2)
        for t in self.terms:
            x = self._shifted(pts, t)
            m = _mono(x, t.expo)
            md = [_mono_d(x, t.expo, k) for k in range(n)]
            if t.profile is not None:
                rho, F = self._radial(x, t)
                theta = x / rho[:, None]
                inv_rho = 1.0 / rho
            for k in range(n):
                for l in range(k, n):
                    val = t.coeff * _mono_dd(x, t.expo, k, l)
                    if t.profile is not None:
                        dtheta = (1.0 if k == l else 0.0) * inv_rho - theta[:, k] * theta[:, l] * inv_rho
                        val = val * F.v + t.coeff * (
                            md[k] * F.d * theta[:, l]
                            + md[l] * F.d * theta[:, k]
                            + m * (F.h * theta[:, k] * theta[:, l] + F.d * dtheta)
                        )
                    out[self._slot(out, t, (k, l))] += val
                    if l != k:
                        out[self._slot(out, t, (l, k))] += val
        return out

    # ---- combinators -------------------------------------------------

    def __add__(self, other: "SeparableField") -> "SeparableField":
        if (other.dim, other.rank) != (self.dim, self.rank):
            raise ValueError("field shapes differ")
        return SeparableField(self.dim, self.rank, self.terms + other.terms)

    def scaled(self, s: float) -> "SeparableField":
        return SeparableField(
            self.dim,
            self.rank,
            [Term(t.slot, s * t.coeff, t.expo, t.profile, t.center) for t in self.terms],
        )


def zero_expo(n: int) -> tuple[int, ...]:
    return (0,) * n


def unit_expo(n: int, *axes: int) -> tuple[int, ...]:
    e = [0] * n
    for a in axes:
        e[a] += 1
    return tuple(e)


def identity_terms(n: int, profile: ProfileFn | None, coeff: float = 1.0,
                   center=None) -> list[Term]:
    """coeff * F(rho) * delta_ij."""
    return [Term((i, i), coeff, zero_expo(n), profile, center) for i in range(n)]


def outer_radial_terms(n: int, profile: ProfileFn | None, coeff: float = 1.0,
                       center=None) -> list[Term]:
    """coeff * F(rho) * x_i x_j  (divide the profile by rho^2 for theta_i theta_j)."""
    out = []
    for i in range(n):
        for j in range(n):
            out.append(Term((i, j), coeff, unit_expo(n, i, j), profile, center))
    return out


def sym_slot_terms(i: int, j: int, coeff: float, expo, profile: ProfileFn | None,
                   center=None) -> list[Term]:
    """Terms for a symmetric rank-2 entry: fills (i, j) and, if distinct, (j, i)."""
    expo = tuple(expo)
    out = [Term((i, j), coeff, expo, profile, center)]
    if i != j:
        out.append(Term((j, i), coeff, expo, profile, center))
    return out
