"""Exact arithmetic in the golden-ratio ring Z[tau].

Elements are m + n*tau with integer m, n and tau = (1 + sqrt 5)/2, so
tau**2 = tau + 1.  The Galois conjugate (star map) sends tau to
tau' = (1 - sqrt 5)/2 = 1 - tau.  Comparisons and sign tests are done in
integer arithmetic only, so window membership decisions never depend on
floating-point rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering

import numpy as np

SQRT5 = math.sqrt(5.0)
TAU = (1.0 + SQRT5) / 2.0
TAU_STAR = (1.0 - SQRT5) / 2.0


def _sign_p_q_sqrt5(P: int, Q: int) -> int:
    """Exact sign of P + Q*sqrt(5) for integers P, Q."""
    if P == 0 and Q == 0:
        return 0
    if P >= 0 and Q >= 0:
        return 1
    if P <= 0 and Q <= 0:
        return -1
    # Opposite signs: compare P**2 with 5*Q**2.
    if P > 0:  # Q < 0
        return 1 if P * P > 5 * Q * Q else -1
    return 1 if 5 * Q * Q > P * P else -1


@total_ordering
@dataclass(frozen=True, slots=True)
class GoldenInt:
    """m + n*tau with exact integer coefficients."""

    m: int
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.m, (int, np.integer)) or not isinstance(self.n, (int, np.integer)):
            raise TypeError("GoldenInt coefficients must be integers")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def from_int(cls, k: int) -> "GoldenInt":
        return cls(int(k), 0)

    def __add__(self, other: "GoldenInt | int") -> "GoldenInt":
        other = _coerce(other)
        return GoldenInt(self.m + other.m, self.n + other.n)

    __radd__ = __add__

    def __sub__(self, other: "GoldenInt | int") -> "GoldenInt":
        other = _coerce(other)
        return GoldenInt(self.m - other.m, self.n - other.n)

    def __rsub__(self, other: "GoldenInt | int") -> "GoldenInt":
        return _coerce(other) - self

    def __neg__(self) -> "GoldenInt":
        return GoldenInt(-self.m, -self.n)

    def __mul__(self, other: "GoldenInt | int") -> "GoldenInt":
        # (a + b tau)(c + d tau) = ac + bd + (ad + bc + bd) tau
        other = _coerce(other)
        a, b, c, d = self.m, self.n, other.m, other.n
        return GoldenInt(a * c + b * d, a * d + b * c + b * d)

    __rmul__ = __mul__

    def star(self) -> "GoldenInt":
        """Galois conjugate: tau -> 1 - tau."""
        return GoldenInt(self.m + self.n, -self.n)

    def norm(self) -> int:
        """Field norm self * self.star() = m**2 + m*n - n**2."""
        return self.m * self.m + self.m * self.n - self.n * self.n

    def sign(self) -> int:
        # m + n tau = ((2m + n) + n sqrt 5) / 2
        return _sign_p_q_sqrt5(2 * self.m + self.n, self.n)

    def value(self) -> float:
        return self.m + self.n * TAU

    def star_value(self) -> float:
        return self.m + self.n * TAU_STAR

    def __float__(self) -> float:
        return self.value()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, np.integer)):
            other = GoldenInt.from_int(other)
        if not isinstance(other, GoldenInt):
            return NotImplemented
        return self.m == other.m and self.n == other.n

    def __hash__(self) -> int:
        return hash((self.m, self.n))

    def __lt__(self, other: "GoldenInt | int") -> bool:
        return (self - _coerce(other)).sign() < 0

    def __repr__(self) -> str:
        return f"GoldenInt({self.m}, {self.n})"


def _coerce(x: "GoldenInt | int") -> GoldenInt:
    if isinstance(x, GoldenInt):
        return x
    if isinstance(x, (int, np.integer)):
        return GoldenInt.from_int(int(x))
    raise TypeError(f"cannot coerce {type(x).__name__} to GoldenInt")


def golden_sign_array(m: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Vectorized exact sign of m + n*tau for int64 arrays.

    Same integer test as GoldenInt.sign, evaluated with numpy.  Inputs must
    stay well below 2**31 so the squared comparisons fit in int64.
    """
    m = np.asarray(m, dtype=np.int64)
    n = np.asarray(n, dtype=np.int64)
    P = 2 * m + n
    Q = n
    if P.size and (np.abs(P).max(initial=0) >= 2**31 or np.abs(Q).max(initial=0) >= 2**31):
        raise OverflowError("coefficients too large for exact int64 sign test")
    out = np.zeros(np.broadcast(P, Q).shape, dtype=np.int64)
    both_pos = (P >= 0) & (Q >= 0)
    both_neg = (P <= 0) & (Q <= 0)
    out[both_pos] = 1
    out[both_neg] = -1
    out[both_pos & both_neg] = 0
    mixed = ~(both_pos | both_neg)
    if np.any(mixed):
        Pm, Qm = P[mixed], Q[mixed]
        cmp = np.where(Pm > 0, np.sign(Pm * Pm - 5 * Qm * Qm), np.sign(5 * Qm * Qm - Pm * Pm))
        out[mixed] = cmp
    return out


def golden_star_sign_array(m: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Vectorized exact sign of m + n*tau' (the star values)."""
    m = np.asarray(m, dtype=np.int64)
    n = np.asarray(n, dtype=np.int64)
    return golden_sign_array(m + n, -n)
