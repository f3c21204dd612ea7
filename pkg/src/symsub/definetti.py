"""Finite de Finetti error bounds and the exponential-decomposition coefficient
recursion that inverts the measure-and-prepare expansion.

Notation used in this module, for fixed (d, n, k) with k <= n:

* A_s = clone_{k-s -> k} o tr_{n-(k-s)}   ("trace down to k-s copies, clone up")
* B_s = clone_{k-s -> k} o MP_{n -> k-s}
* M_{j,s} = mp_clone_coefficient(d, n, j, s)

The expansion B_r = sum_{s >= r} M_{k-r, k-s} A_s (a reindexed instance of the
measure-and-prepare identity composed with a cloner) is inverted step by step:
after r steps, A_0 = sum_{s<r} x_s B_s + sum_{s>=r} y_s^(r) A_s with exact
rational coefficients.  At r = k the leftover term A_k equals B_k (both reduce
to "trace everything, prepare the normalized symmetric state"), giving the
clean form tr_{n-k} = sum_s x_s clone_{k-s -> k} o MP_{n -> k-s}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .channels import (
    Superoperator,
    clone_channel_sym,
    compose,
    mp_channel_sym,
    trace_channel_sym,
)
from .exactcomb import mp_clone_coefficient


def definetti_epsilon(d: int, n: int, k: int) -> Fraction:
    """The de Finetti error coefficient k(d+k)/(n+d); meaningful when <= 1."""
    if k < 0 or n < 0 or d < 1:
        raise ValueError("invalid arguments")
    return Fraction(k * (d + k), n + d)


def definetti_delta(d: int, n: int, k: int) -> Fraction:
    """The recursion's contraction parameter k(d+k)/n."""
    if n < 1:
        raise ValueError("n must be positive")
    return Fraction(k * (d + k), n)


@dataclass(frozen=True)
class DeFinettiCoefficients:
    """Exact coefficients after r inversion steps.

    x[s] multiplies B_s for s < r; y[s - r] multiplies A_s for s = r..k.
    """

    d: int
    n: int
    k: int
    r: int
    delta: Fraction
    x: tuple[Fraction, ...]
    y: tuple[Fraction, ...]


def exp_definetti_coefficients(d: int, n: int, k: int, r: int) -> DeFinettiCoefficients:
    """Run the inversion recursion for r steps, exactly.

    Base case r=0 is A_0 = 1 * A_0.  Each step replaces the leading A_r term,
    using A_r = B_r / M_{k-r,k-r} - sum_{s>r} (M_{k-r,k-s}/M_{k-r,k-r}) A_s,
    so x_r = y_r^(r) / M_{k-r,k-r} and
    y_s^(r+1) = y_s^(r) - (M_{k-r,k-s}/M_{k-r,k-r}) y_r^(r).
    """
    if not (0 <= r <= k <= n):
        raise ValueError("need 0 <= r <= k <= n")
    if d < 1:
        raise ValueError("d must be positive")
    y = [Fraction(0)] * (k + 1)
    y[0] = Fraction(1)
    x: list[Fraction] = []
    for step in range(r):
        head = y[step]
        m_diag = mp_clone_coefficient(d, n, k - step, k - step)
        x.append(head / m_diag)
        for s in range(step + 1, k + 1):
            y[s] -= head * mp_clone_coefficient(d, n, k - step, k - s) / m_diag
        y[step] = Fraction(0)
    return DeFinettiCoefficients(
        d=d, n=n, k=k, r=r,
        delta=definetti_delta(d, n, k),
        x=tuple(x),
        y=tuple(y[r:]),
    )


def exp_definetti_full_coefficients(d: int, n: int, k: int) -> tuple[Fraction, ...]:
    """Coefficients x_0..x_k of tr_{n-k} = sum_s x_s clone_{k-s->k} o MP_{n->k-s}.

    Runs the recursion to r = k; the final leftover weight y_k^(k) multiplies
    A_k = B_k, so it becomes x_k.
    """
    c = exp_definetti_coefficients(d, n, k, k)
    return c.x + (c.y[0],)


def _a_expansion_in_basis(d: int, n: int, k: int, s: int) -> list[Fraction]:
    """B_s expressed in the A basis: B_s = sum_{t>=s} M_{k-s,k-t} A_t."""
    row = [Fraction(0)] * (k + 1)
    for t in range(s, k + 1):
        row[t] = mp_clone_coefficient(d, n, k - s, k - t)
    return row


def exp_definetti_identity_check(d: int, n: int, k: int, r: int) -> bool:
    """Exact rational verification that the r-step coefficients reproduce A_0
    when every B_s is expanded back into the A basis."""
    c = exp_definetti_coefficients(d, n, k, r)
    acc = [Fraction(0)] * (k + 1)
    for s, xs in enumerate(c.x):
        row = _a_expansion_in_basis(d, n, k, s)
        for t in range(k + 1):
            acc[t] += xs * row[t]
    for s in range(r, k + 1):
        acc[s] += c.y[s - r]
    target = [Fraction(1)] + [Fraction(0)] * k
    return acc == target


@dataclass(frozen=True)
class CoefficientBoundsReport:
    applicable: bool
    delta: Fraction
    x_bounds_ok: bool
    y_bounds_ok: bool
    x_details: tuple[tuple[int, Fraction, Fraction, bool], ...]
    y_details: tuple[tuple[int, Fraction, Fraction, bool], ...]
    truncation_tail: Fraction

    @property
    def passed(self) -> bool:
        return (not self.applicable) or (self.x_bounds_ok and self.y_bounds_ok)


def check_coefficient_bounds(c: DeFinettiCoefficients) -> CoefficientBoundsReport:
    """Exact comparisons |x_s| <= (2 delta)^s / (1 - delta), |y_s| <= 2^r delta^s.

    Reported as not-applicable when delta >= 1.  The truncation tail
    sum_{s >= r} |y_s^(r)| is reported as a diagnostic of the dropped terms; no
    claim is made that it equals any diamond-norm error.
    """
    delta = c.delta
    tail = sum((abs(v) for v in c.y), Fraction(0))
    if delta >= 1:
        return CoefficientBoundsReport(
            applicable=False, delta=delta, x_bounds_ok=True, y_bounds_ok=True,
            x_details=(), y_details=(), truncation_tail=tail,
        )
    x_details = []
    for s, xs in enumerate(c.x):
        bound = (2 * delta) ** s / (1 - delta)
        x_details.append((s, abs(xs), bound, abs(xs) <= bound))
    y_details = []
    for offset, ys in enumerate(c.y):
        s = c.r + offset
        bound = Fraction(2) ** c.r * delta**s
        y_details.append((s, abs(ys), bound, abs(ys) <= bound))
    return CoefficientBoundsReport(
        applicable=True,
        delta=delta,
        x_bounds_ok=all(row[3] for row in x_details),
        y_bounds_ok=all(row[3] for row in y_details),
        x_details=tuple(x_details),
        y_details=tuple(y_details),
        truncation_tail=tail,
    )


def exp_definetti_sides(d: int, n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """tr_{n-k} and sum_s x_s clone_{k-s->k} o MP_{n->k-s} on symmetric
    coordinates, as superoperator matrices."""
    lhs = trace_channel_sym(d, n, k).matrix
    coeffs = exp_definetti_full_coefficients(d, n, k)
    rhs = np.zeros_like(lhs)
    for s, xs in enumerate(coeffs):
        piece = compose(mp_channel_sym(d, n, k - s), clone_channel_sym(d, k - s, s))
        rhs += float(xs) * piece.matrix
    return lhs, rhs


def verify_exp_definetti(d: int, n: int, k: int) -> float:
    """Frobenius residual of the exact inversion identity at r = k.

    The identity is pure linear algebra in the channel coefficients, so it
    holds for every k <= n, including delta >= 1.
    """
    lhs, rhs = exp_definetti_sides(d, n, k)
    return float(np.linalg.norm(lhs - rhs))


def mp_remainder_channel_sym(d: int, n: int, k: int) -> tuple[Fraction, Superoperator]:
    """Split MP_{n->k} = (1-eps) tr_{n-k} + eps N with eps = 1 - M_{k,k};
    returns (eps, N) on symmetric coordinates.  N is completely positive and
    trace preserving there, which is the content of the two-term de Finetti
    decomposition."""
    m_kk = mp_clone_coefficient(d, n, k, k)
    eps = 1 - m_kk
    mp = mp_channel_sym(d, n, k)
    tr = trace_channel_sym(d, n, k)
    if eps == 0:
        return eps, Superoperator(np.zeros_like(mp.matrix), mp.in_dims, mp.out_dims)
    remainder = (mp.matrix - float(m_kk) * tr.matrix) / float(eps)
    return eps, Superoperator(remainder, mp.in_dims, mp.out_dims)
