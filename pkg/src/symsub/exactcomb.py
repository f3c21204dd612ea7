"""Exact combinatorics: binomials, symmetric-subspace dimensions, hypergeometric
clone/measure-and-prepare coefficients, Jacobi polynomials, and the rational
normalization of real unit-vector moments.

Everything here is exact.  Coefficients are Python ints or ``fractions.Fraction``
(arbitrary precision, always in lowest terms); floating point never enters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence


@dataclass(frozen=True)
class TypeVector:
    """Occupation counts (t_1, ..., t_d) of a length-n string over a d-letter alphabet."""

    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) == 0:
            raise ValueError("type vector needs at least one entry")
        if any(t < 0 for t in self.entries):
            raise ValueError("occupation counts must be nonnegative")

    @property
    def d(self) -> int:
        return len(self.entries)

    @property
    def total(self) -> int:
        return sum(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def binomial(a: int, b: int) -> int:
    """Binomial coefficient C(a, b); zero outside 0 <= b <= a."""
    if a < 0:
        raise ValueError("a must be nonnegative")
    if b < 0 or b > a:
        return 0
    return comb(a, b)


def multinomial(n: int, t: TypeVector | Sequence[int]) -> int:
    """n! / (t_1! ... t_d!) for occupation counts summing to n."""
    counts = tuple(t)
    if sum(counts) != n:
        raise ValueError(f"occupation counts sum to {sum(counts)}, expected {n}")
    out = factorial(n)
    for c in counts:
        out //= factorial(c)
    return out


def sym_dim(d: int, n: int) -> int:
    """Dimension C(d+n-1, n) of the symmetric subspace of n systems of dimension d."""
    if d < 1:
        raise ValueError("d must be positive")
    if n < 0:
        raise ValueError("n must be nonnegative")
    return comb(d + n - 1, n)


def enumerate_types(d: int, n: int) -> list[TypeVector]:
    """All occupation vectors for (d, n), ordered lexicographically descending in t_1.

    This ordering is the column order of every type-basis matrix in the package.
    """
    if d < 1:
        raise ValueError("d must be positive")
    out: list[TypeVector] = []

    def rec(prefix: tuple[int, ...], remaining: int, slots: int):
        if slots == 1:
            out.append(TypeVector(prefix + (remaining,)))
            return
        for first in range(remaining, -1, -1):
            rec(prefix + (first,), remaining - first, slots - 1)

    rec((), n, d)
    return out


def mp_clone_coefficient(d: int, n: int, k: int, s: int) -> Fraction:
    """Hypergeometric weight C(n,s) C(d+k-1,k-s) / C(d+n+k-1,k).

    These weights mix "trace down to s copies, clone back up to k" channels into
    the optimal n-to-k measure-and-prepare channel; they sum to one over s=0..k.
    """
    return Fraction(binomial(n, s) * binomial(d + k - 1, k - s), binomial(d + n + k - 1, k))


def mp_clone_polynomial(d: int, n: int, k: int, x: Fraction | int) -> Fraction:
    """Evaluate sum_s mp_clone_coefficient(d,n,k,s) * x**s exactly."""
    xf = Fraction(x)
    acc = Fraction(0)
    power = Fraction(1)
    for s in range(k + 1):
        acc += mp_clone_coefficient(d, n, k, s) * power
        power *= xf
    return acc


def jacobi_polynomial(alpha: int, beta: int, k: int, y: Fraction | int) -> Fraction:
    """Jacobi polynomial P_k^(alpha,beta)(y) by the three-term recurrence, exactly.

    Raises ValueError at integer parameters where the recurrence denominator
    vanishes (only possible for alpha + beta <= -2).
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    yf = Fraction(y)
    p_prev = Fraction(1)
    if k == 0:
        return p_prev
    p_cur = Fraction(alpha + 1) + Fraction(alpha + beta + 2) * (yf - 1) / 2
    for j in range(2, k + 1):
        c = 2 * j + alpha + beta
        denom = 2 * j * (j + alpha + beta) * (c - 2)
        if denom == 0:
            raise ValueError(
                f"three-term recurrence singular at step {j} for (alpha, beta)=({alpha}, {beta})"
            )
        lin = Fraction((c - 1) * (alpha**2 - beta**2)) + Fraction((c - 2) * (c - 1) * c) * yf
        p_next = (lin * p_cur - Fraction(2 * (j + alpha - 1) * (j + beta - 1) * c) * p_prev) / denom
        p_prev, p_cur = p_cur, p_next
    return p_cur


JACOBI_CHECK_POINTS = (Fraction(0), Fraction(1, 2), Fraction(2), Fraction(-1, 3), Fraction(7, 5))


def mp_polynomial_jacobi_identity(d: int, n: int, k: int, points=JACOBI_CHECK_POINTS) -> bool:
    """Exact check that the coefficient polynomial has the Jacobi form
    M_k(x) = (x-1)^k / C(d+n+k-1, k) * P_k^(n-k, d-1)((x+1)/(x-1))
    at the given rational points (x = 1 is excluded by the default set)."""
    for x in points:
        xf = Fraction(x)
        lhs = mp_clone_polynomial(d, n, k, xf)
        y = (xf + 1) / (xf - 1)
        rhs = (xf - 1) ** k * jacobi_polynomial(n - k, d - 1, k, y) / binomial(d + n + k - 1, k)
        if lhs != rhs:
            return False
    return True


def real_moment_ratio(d: int, n: int) -> Fraction:
    """Exact value of 1 / (d (d+2) (d+4) ... (d+2n-2)).

    This is the half-integer Gamma-function ratio that normalizes the n-th
    tensor-power moment of a real unit vector against the real Gaussian moment;
    it telescopes to a rational, so no floating-point Gamma is needed.
    """
    if d < 1:
        raise ValueError("d must be positive")
    if n < 0:
        raise ValueError("n must be nonnegative")
    prod = 1
    for i in range(n):
        prod *= d + 2 * i
    return Fraction(1, prod)


def rising_factorial_dim(d: int, n: int) -> Fraction:
    """d(d+1)...(d+n-1)/n!, the product form of sym_dim; kept for cross-checks."""
    num = 1
    for i in range(n):
        num *= d + i
    return Fraction(num, factorial(n))
