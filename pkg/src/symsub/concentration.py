"""Moment-method concentration for random subspaces: exact tensor-power moments
of projector overlaps, best-product-state overlap estimation, and the tail
bounds they imply, with the desk-scale corollary experiments.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import exp, log, prod

import numpy as np

from .exactcomb import sym_dim
from .guards import guard_dimension
from .randomness import RngStream, haar_state_batch, random_projector
from .tensorspace import Operator, sym_projector_group


@dataclass(frozen=True)
class MultiPartition:
    """Subsystem dimensions d_1..d_k of a k-party space."""

    dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.dims or any(d < 1 for d in self.dims):
            raise ValueError("dims must be positive")

    @property
    def total(self) -> int:
        return prod(self.dims)

    @property
    def parties(self) -> int:
        return len(self.dims)


def _interleave_map(dims: tuple[int, ...], n: int) -> np.ndarray:
    """sigma with W|copy-major x> = |system-major sigma(x)> for n copies.

    Copy-major digit order is (copy 1: d_1..d_k, copy 2: d_1..d_k, ...);
    system-major groups all n copies of system 1, then system 2, etc.
    """
    k = len(dims)
    total = prod(dims) ** n
    radices_copy = list(dims) * n
    digits = np.empty((total, n * k), dtype=np.int64)
    rem = np.arange(total)
    for pos in reversed(range(n * k)):
        digits[:, pos] = rem % radices_copy[pos]
        rem //= radices_copy[pos]
    radices_sys = [dims[i] for i in range(k) for _ in range(n)]
    pv = np.ones(n * k, dtype=np.int64)
    for pos in reversed(range(n * k - 1)):
        pv[pos] = pv[pos + 1] * radices_sys[pos + 1]
    sigma = np.zeros(total, dtype=np.int64)
    for i in range(k):
        for c in range(n):
            sigma += digits[:, c * k + i] * pv[i * n + c]
    return sigma


def mu_exact(op: Operator, part: MultiPartition, n: int) -> float:
    """n-th moment E (tr P (phi_1 x ... x phi_k))^n over independent Haar
    product states, evaluated exactly via per-system symmetric projectors.

    Equals tr[P^(x n) W^dag ((x)_i Pi_sym^(d_i,n)/sym_dim) W] with W the
    copy/system interleaving permutation; W enters only as an index map and
    P^(x n) is contracted one copy at a time, so a single dense matrix of side
    total**n is the peak memory.
    """
    dims = part.dims
    if op.row_dims == op.col_dims and op.row_dim == part.total and len(op.row_dims) != part.parties:
        op = Operator(op.entries, dims, dims)
    if op.row_dims != dims or op.col_dims != dims:
        raise ValueError(f"operator dims {op.row_dims} do not match partition {dims}")
    total = part.total
    guard_dimension(total**n, "moment matrix")
    moments = [
        sym_projector_group(d, n).entries / sym_dim(d, n) for d in dims
    ]
    kq = reduce(np.kron, moments)
    sigma = _interleave_map(dims, n)
    mat = kq[np.ix_(sigma, sigma)]
    tensor = mat.reshape((total,) * n + (total,) * n)
    pm = op.entries
    for step in range(n):
        tensor = np.tensordot(pm, tensor, axes=([1, 0], [0, n - step]))
    value = complex(tensor)
    return float(value.real)


# ---------------------------------------------------------------------------
# best product-state overlap
# ---------------------------------------------------------------------------

def _phase_fix(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    for entry in v:
        if abs(entry) > tol:
            return v * (entry.conjugate() / abs(entry))
    return v


def _bipartite_rank_one_nu(op: Operator, part: MultiPartition, tol: float) -> float | None:
    """Exact nu for k=2 and P = lambda |psi><psi|: lambda times the squared top
    Schmidt coefficient of psi."""
    if part.parties != 2:
        return None
    evals, evecs = np.linalg.eigh(op.entries)
    top = evals[-1]
    if top <= 0 or np.any(np.abs(evals[:-1]) > tol * max(1.0, top)):
        return None
    psi = evecs[:, -1].reshape(part.dims)
    s = np.linalg.svd(psi, compute_uv=False)
    return float(top * s[0] ** 2)


def nu_max(
    op: Operator,
    part: MultiPartition,
    restarts: int = 32,
    iters: int = 200,
    stream: RngStream | None = None,
    tol: float = 1e-12,
) -> float:
    """Best overlap max tr[P (phi_1 x ... x phi_k)] over product states.

    Alternating eigenvector ascent (a lower bound in general): hold all but
    one party fixed, replace that party's vector by the top eigenvector of the
    contracted matrix, sweep until converged; best over random restarts.  For
    two parties and a rank-one PSD operator the exact value is returned via
    the Schmidt decomposition.
    """
    dims = part.dims
    if op.row_dims == op.col_dims and op.row_dim == part.total and len(op.row_dims) != part.parties:
        op = Operator(op.entries, dims, dims)
    if op.row_dims != dims or op.col_dims != dims:
        raise ValueError(f"operator dims {op.row_dims} do not match partition {dims}")
    if np.abs(op.entries - op.entries.conj().T).max() > 1e-10:
        raise ValueError("nu_max requires a Hermitian operator")
    exact = _bipartite_rank_one_nu(op, part, 1e-10)
    if exact is not None:
        return exact

    k = part.parties
    tensor = op.entries.reshape(dims + dims)
    stream = stream or RngStream(seed=0)
    gen = stream.generator()

    row_letters = [chr(ord("a") + i) for i in range(k)]
    col_letters = [chr(ord("A") + i) for i in range(k)]
    base = "".join(row_letters) + "".join(col_letters)

    def environment(vectors, j):
        operands = [tensor]
        script = [base]
        for i in range(k):
            if i == j:
                continue
            operands.append(vectors[i].conj())
            script.append(row_letters[i])
            operands.append(vectors[i])
            script.append(col_letters[i])
        subscript = ",".join(script) + "->" + row_letters[j] + col_letters[j]
        return np.einsum(subscript, *operands, optimize=True)

    best = -np.inf
    for _ in range(max(1, restarts)):
        vectors = []
        for d in dims:
            v = gen.standard_normal(d) + 1j * gen.standard_normal(d)
            vectors.append(v / np.linalg.norm(v))
        value = -np.inf
        for _ in range(iters):
            previous = value
            for j in range(k):
                env = environment(vectors, j)
                evals, evecs = np.linalg.eigh((env + env.conj().T) / 2.0)
                vectors[j] = _phase_fix(evecs[:, -1])
                value = float(evals[-1])
            if value - previous <= tol:
                break
        best = max(best, value)
    return best


# ---------------------------------------------------------------------------
# tail bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailBoundResult:
    gamma: Fraction
    n_star: int
    bound: Fraction
    per_n: tuple[tuple[int, Fraction], ...]


def tail_bound_term(part: MultiPartition, rank: int, gamma: Fraction, n: int) -> Fraction:
    """C(rank+n-1,n) prod_i C(d_i+n-1,n) / (gamma^n C(D+n-1,n)), exactly."""
    g = Fraction(gamma)
    if g <= 0:
        raise ValueError("gamma must be positive")
    num = sym_dim(rank, n)
    for d in part.dims:
        num *= sym_dim(d, n)
    return Fraction(num) / (g**n * sym_dim(part.total, n))


def tail_bound(part: MultiPartition, rank: int, gamma, n_max: int = 64) -> TailBoundResult:
    """Minimize the moment tail bound over n = 1..n_max in exact rationals.

    Bounds Pr[nu(Pi) >= gamma] for a Haar-random rank-``rank`` projector.
    Floats passed as gamma are converted exactly (binary expansion).
    """
    g = Fraction(gamma)
    per = []
    best_n, best = 1, None
    for n in range(1, n_max + 1):
        value = tail_bound_term(part, rank, g, n)
        per.append((n, value))
        if best is None or value < best:
            best, best_n = value, n
    return TailBoundResult(gamma=g, n_star=best_n, bound=best, per_n=tuple(per))


def product_state_threshold(part: MultiPartition, rank: int) -> bool:
    """True iff D > rank + sum_i (d_i - 1), the regime where a random rank-r
    subspace almost surely contains no product state."""
    return part.total > rank + sum(d - 1 for d in part.dims)


@dataclass(frozen=True)
class SmoothGapResult:
    d: int
    x: int
    rank: int
    n: int
    gamma: Fraction
    bound: Fraction
    threshold: Fraction
    satisfied: bool


def smooth_gap_bound(d: int, x: int) -> SmoothGapResult:
    """Near-critical-rank tail evaluation on C^d (x) C^d.

    rank = d^2 - 2(d-1) - x, n = d^(2 + 2d/x), gamma = 1 - 1/n; evaluates the
    single-n tail term exactly and compares it against d^-d.
    """
    if x < 1:
        raise ValueError("x must be >= 1")
    rank = d * d - 2 * (d - 1) - x
    if rank < 1:
        raise ValueError(f"rank {rank} < 1 for (d, x)=({d}, {x})")
    exponent = 2 + 2 * d / x
    n = int(round(d**exponent))
    gamma = 1 - Fraction(1, n)
    part = MultiPartition((d, d))
    bound = tail_bound_term(part, rank, gamma, n)
    threshold = Fraction(1, d**d)
    return SmoothGapResult(
        d=d, x=x, rank=rank, n=n, gamma=gamma,
        bound=bound, threshold=threshold, satisfied=bound <= threshold,
    )


def multiqubit_bound_expression(k: int, eps: float) -> float:
    """The k-qubit tail bound after substituting n = k/eps and
    gamma = k^(1+2 eps) 2^-k / e into the moment bound:
    (k/eps)^k (k/(e eps))^(k/eps) e^(k/eps) / k^(k(2+1/eps))."""
    n = k / eps
    log_value = (
        k * (log(k) - log(eps))
        + n * (log(k) - 1.0 - log(eps))
        + n
        - k * (2.0 + 1.0 / eps) * log(k)
    )
    return exp(log_value)


def multiqubit_bound_closed_form(k: int, eps: float) -> float:
    """(eps^-(1+1/eps) / k)^k, the simplified form of the expression above."""
    return exp(k * (-(1.0 + 1.0 / eps) * log(eps) - log(k)))


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchmidtTailReport:
    d: int
    samples: int
    epsilon: float
    threshold: float
    exceedances: int
    fraction: float
    bound: float
    mean_top_schmidt: float

    @property
    def passed(self) -> bool:
        return self.fraction <= self.bound


def experiment_schmidt_tail(d: int, samples: int, epsilon: float, stream: RngStream) -> SchmidtTailReport:
    """Sample Haar states on C^d (x) C^d and compare the empirical tail of the
    largest squared Schmidt coefficient against the bound
    Pr[lambda_max >= (16/(e d)) e^eps] <= e^(-d eps)."""
    guard_dimension(d * d)
    threshold = 16.0 / (np.e * d) * exp(epsilon)
    exceed = 0
    top_sum = 0.0
    done = 0
    block = 0
    while done < samples:
        size = min(1024, samples - done)
        psi = haar_state_batch(d * d, stream.block_generator(block), size)
        svals = np.linalg.svd(psi.reshape(size, d, d), compute_uv=False)
        lam = svals[:, 0] ** 2
        exceed += int(np.sum(lam >= threshold))
        top_sum += float(lam.sum())
        done += size
        block += 1
    return SchmidtTailReport(
        d=d, samples=samples, epsilon=epsilon, threshold=threshold,
        exceedances=exceed, fraction=exceed / samples, bound=exp(-d * epsilon),
        mean_top_schmidt=top_sum / samples,
    )


@dataclass(frozen=True)
class ProductFreeReport:
    dims: tuple[int, ...]
    rank: int
    threshold_met: bool
    trials: int
    overlaps: tuple[float, ...]
    max_overlap: float

    @property
    def passed(self) -> bool:
        """True when every trial stayed below 1 - 1e-3, or vacuously when the
        dimension threshold fails and no claim is made."""
        if not self.threshold_met:
            return True
        return self.max_overlap < 1.0 - 1e-3


def experiment_product_free(
    part: MultiPartition,
    rank: int,
    restarts: int,
    stream: RngStream,
    trials: int = 20,
) -> ProductFreeReport:
    """Draw random rank-r projectors and estimate their best product overlap.

    When the dimension-counting threshold holds, every trial is expected to
    stay below 1 - 1e-3.  When it does not hold, the report says so and makes
    no claim."""
    met = product_state_threshold(part, rank)
    overlaps: list[float] = []
    if met:
        for t in range(trials):
            proj = random_projector(part.total, rank, stream.split(t))
            proj = Operator(proj.entries, part.dims, part.dims)
            overlaps.append(nu_max(proj, part, restarts=restarts, stream=stream.split(10_000 + t)))
    return ProductFreeReport(
        dims=part.dims, rank=rank, threshold_met=met, trials=trials if met else 0,
        overlaps=tuple(overlaps), max_overlap=max(overlaps) if overlaps else 0.0,
    )
