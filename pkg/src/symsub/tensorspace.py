"""Dense operators on multi-subsystem tensor spaces.

Conventions used throughout:

* Subsystems are 0-indexed and ordered; composite basis index
  ``x = sum_m x_m * prod(dims[m+1:])`` (first factor most significant,
  matching ``numpy.kron``).
* A permutation ``pi`` acts by moving the content of tensor slot ``l`` to slot
  ``pi(l)``, i.e. ``P(pi)|x_0,...,x_{n-1}> = |y>`` with ``y[pi(l)] = x[l]``.
  This makes ``P`` a homomorphism: ``P(pi1 o pi2) = P(pi1) P(pi2)``.
* "Trace out the last subsystems" is the pinned reading of reduced channels;
  on permutation-symmetric inputs any other choice agrees.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations as iter_permutations
from math import factorial, prod
from typing import Iterable

import numpy as np

from .exactcomb import enumerate_types, multinomial, sym_dim
from .guards import guard_dimension, guard_matchings, guard_permutations


@dataclass(frozen=True)
class Operator:
    """Dense complex matrix tagged with row/column subsystem dimensions."""

    entries: np.ndarray
    row_dims: tuple[int, ...]
    col_dims: tuple[int, ...]

    def __post_init__(self):
        mat = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", mat)
        object.__setattr__(self, "row_dims", tuple(int(d) for d in self.row_dims))
        object.__setattr__(self, "col_dims", tuple(int(d) for d in self.col_dims))
        if not self.row_dims or not self.col_dims:
            raise ValueError("subsystem dimension lists must be nonempty")
        if mat.shape != (prod(self.row_dims), prod(self.col_dims)):
            raise ValueError(
                f"matrix shape {mat.shape} does not match dims "
                f"{self.row_dims} x {self.col_dims}"
            )

    @property
    def row_dim(self) -> int:
        return prod(self.row_dims)

    @property
    def col_dim(self) -> int:
        return prod(self.col_dims)

    def dagger(self) -> "Operator":
        return Operator(self.entries.conj().T, self.col_dims, self.row_dims)

    def trace(self) -> complex:
        if self.row_dims != self.col_dims:
            raise ValueError("trace requires square subsystem structure")
        return complex(np.trace(self.entries))

    def __matmul__(self, other: "Operator") -> "Operator":
        if self.col_dims != other.row_dims:
            raise ValueError(f"dimension mismatch: {self.col_dims} vs {other.row_dims}")
        return Operator(self.entries @ other.entries, self.row_dims, other.col_dims)


def operator_tensor(a: Operator, b: Operator) -> Operator:
    """Kronecker product with concatenated subsystem lists."""
    return Operator(np.kron(a.entries, b.entries), a.row_dims + b.row_dims, a.col_dims + b.col_dims)


def frobenius_distance(a: Operator | np.ndarray, b: Operator | np.ndarray) -> float:
    am = a.entries if isinstance(a, Operator) else np.asarray(a)
    bm = b.entries if isinstance(b, Operator) else np.asarray(b)
    return float(np.linalg.norm(am - bm))


def operator_to_json(op: Operator) -> dict:
    """JSON form: subsystem dims plus row-major [re, im] entry pairs."""
    flat = [[float(z.real), float(z.imag)] for z in op.entries.ravel(order="C")]
    return {"row_dims": list(op.row_dims), "col_dims": list(op.col_dims), "entries": flat}


def operator_from_json(data: dict) -> Operator:
    row_dims = tuple(data["row_dims"])
    col_dims = tuple(data["col_dims"])
    flat = np.array([complex(re, im) for re, im in data["entries"]])
    return Operator(flat.reshape(prod(row_dims), prod(col_dims)), row_dims, col_dims)


# ---------------------------------------------------------------------------
# permutations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Permutation:
    """A bijection of {0, ..., n-1}; images[i] is the image of slot i."""

    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(i) for i in self.images))
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"{self.images} is not a permutation")

    @property
    def n(self) -> int:
        return len(self.images)

    def compose(self, other: "Permutation") -> "Permutation":
        """self o other (other applied first)."""
        if self.n != other.n:
            raise ValueError("size mismatch")
        return Permutation(tuple(self.images[other.images[i]] for i in range(self.n)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, img in enumerate(self.images):
            inv[img] = i
        return Permutation(tuple(inv))

    def cycle_count(self) -> int:
        seen = [False] * self.n
        cycles = 0
        for start in range(self.n):
            if seen[start]:
                continue
            cycles += 1
            j = start
            while not seen[j]:
                seen[j] = True
                j = self.images[j]
        return cycles

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(n)))


def all_permutations(n: int) -> list[Permutation]:
    guard_permutations(n)
    return [Permutation(images) for images in iter_permutations(range(n))]


@lru_cache(maxsize=None)
def _index_digits(d: int, n: int) -> np.ndarray:
    """(d**n, n) array of big-endian base-d digits of 0..d**n-1; read-only."""
    idx = np.arange(d**n)
    digits = np.empty((d**n, n), dtype=np.int64)
    for pos in range(n):
        digits[:, n - 1 - pos] = (idx // d**pos) % d
    digits.setflags(write=False)
    return digits


def _place_values(d: int, n: int) -> np.ndarray:
    return np.array([d ** (n - 1 - m) for m in range(n)], dtype=np.int64)


def permutation_index_map(d: int, pi: Permutation) -> np.ndarray:
    """Index map t with P(pi)|x> = |t[x]> on the composite basis of (C^d)^(x n)."""
    n = pi.n
    digits = _index_digits(d, n)
    out_digits = np.empty_like(digits)
    out_digits[:, list(pi.images)] = digits
    return out_digits @ _place_values(d, n)


def permutation_operator(d: int, pi: Permutation) -> Operator:
    """The 0/1 matrix permuting tensor factors of (C^d)^(x n) by pi."""
    n = pi.n
    dim = d**n
    guard_dimension(dim)
    mat = np.zeros((dim, dim))
    mat[permutation_index_map(d, pi), np.arange(dim)] = 1.0
    return Operator(mat, (d,) * n, (d,) * n)


# ---------------------------------------------------------------------------
# symmetric projector, two ways
# ---------------------------------------------------------------------------

def _transposition_index_map(d: int, n: int, i: int, j: int) -> np.ndarray:
    digits = _index_digits(d, n).copy()
    digits[:, [i, j]] = digits[:, [j, i]]
    return digits @ _place_values(d, n)


@lru_cache(maxsize=None)
def _symmetrizer_int(d: int, n: int) -> np.ndarray:
    """Unnormalized symmetrizer sum_pi P(pi) with exact int64 entries.

    Computed by the left-coset cascade S_m = (S_{m-1} (x) I) (I + sum_j T_{j,m}),
    which reproduces the full group sum without enumerating S_n.  Entries are
    bounded by n!, inside int64 for every n whose d**n (d >= 2) could pass the
    size guard; d = 1 is handled by the caller and n > 20 refused outright.
    """
    if n > 20:
        raise ValueError("symmetrizer entries would overflow int64 beyond n = 20")
    mat = np.eye(d, dtype=np.int64)
    for m in range(2, n + 1):
        base = np.kron(mat, np.eye(d, dtype=np.int64))
        total = base.copy()
        for j in range(m - 1):
            total += base[:, _transposition_index_map(d, m, j, m - 1)]
        mat = total
    mat.setflags(write=False)
    return mat


@lru_cache(maxsize=None)
def _sym_projector_matrix(d: int, n: int) -> np.ndarray:
    guard_dimension(d**n)
    if n == 0 or d == 1:
        mat = np.ones((1, 1), dtype=complex)
    else:
        mat = _symmetrizer_int(d, n).astype(complex) / factorial(n)
    mat.setflags(write=False)
    return mat


def sym_projector_group(d: int, n: int) -> Operator:
    """Group-average projector (1/n!) sum_pi P(pi) onto the symmetric subspace."""
    guard_dimension(d**n)  # re-checked here: the cached builder may be warm
    if n == 0:
        return Operator(_sym_projector_matrix(d, 0), (1,), (1,))
    return Operator(_sym_projector_matrix(d, n), (d,) * n, (d,) * n)


def sym_projector_enumerated(d: int, n: int) -> Operator:
    """Literal group average by enumerating S_n; cross-check for small n."""
    guard_dimension(d**n)
    guard_permutations(n)
    dim = d**n
    acc = np.zeros((dim, dim))
    cols = np.arange(dim)
    for pi in all_permutations(n):
        acc[permutation_index_map(d, pi), cols] += 1.0
    return Operator(acc / factorial(n), (d,) * n, (d,) * n)


@lru_cache(maxsize=None)
def _type_isometry_matrix(d: int, n: int) -> np.ndarray:
    guard_dimension(d**n)
    types = enumerate_types(d, n)
    col_of = {t.entries: c for c, t in enumerate(types)}
    dim = d**n
    mat = np.zeros((dim, len(types)), dtype=complex)
    if n == 0:
        mat[0, 0] = 1.0
    else:
        digits = _index_digits(d, n)
        counts = np.stack([(digits == a).sum(axis=1) for a in range(d)], axis=1)
        norms = {t.entries: 1.0 / np.sqrt(multinomial(n, t)) for t in types}
        for row in range(dim):
            t = tuple(int(c) for c in counts[row])
            mat[row, col_of[t]] = norms[t]
    mat.setflags(write=False)
    return mat


def type_isometry(d: int, n: int) -> Operator:
    """Isometry V whose columns are unit-normalized type states.

    Columns follow the enumerate_types order; V^dag V = I on sym_dim(d, n)
    coordinates and V V^dag is the symmetric projector.  Note the normalization
    is 1/sqrt(multinomial) per string so each column has unit norm.
    """
    guard_dimension(d**n)  # re-checked here: the cached builder may be warm
    mat = _type_isometry_matrix(d, n)
    if n == 0:
        return Operator(mat, (1,), (1,))
    return Operator(mat, (d,) * n, (sym_dim(d, n),))


# ---------------------------------------------------------------------------
# perfect matchings and their index-identification operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Matching:
    """A perfect matching of {0, ..., 2n-1} as sorted disjoint pairs."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        norm = tuple(sorted((min(a, b), max(a, b)) for a, b in self.pairs))
        object.__setattr__(self, "pairs", norm)
        flat = [x for pair in norm for x in pair]
        if sorted(flat) != list(range(2 * len(norm))):
            raise ValueError(f"{self.pairs} is not a perfect matching of [0, {2*len(norm)})")

    @property
    def n(self) -> int:
        return len(self.pairs)


def enumerate_matchings(n: int) -> list[Matching]:
    """All (2n-1)!! perfect matchings of {0,...,2n-1}, deterministic order."""
    guard_matchings(n)
    out: list[Matching] = []

    def rec(unmatched: tuple[int, ...], acc: tuple[tuple[int, int], ...]):
        if not unmatched:
            out.append(Matching(acc))
            return
        first, rest = unmatched[0], unmatched[1:]
        for pos, partner in enumerate(rest):
            rec(rest[:pos] + rest[pos + 1:], acc + ((first, partner),))

    rec(tuple(range(2 * n)), ())
    return out


def matching_from_permutation(pi: Permutation) -> Matching:
    """The pairing {(pi(m), n+m)} whose matching operator equals P(pi)."""
    n = pi.n
    return Matching(tuple((pi.images[m], n + m) for m in range(n)))


def matching_operator(d: int, n: int, matching: Matching) -> Operator:
    """sigma_M = sum over strings i in [d]^{2n} compatible with M of
    |i_0..i_{n-1}><i_n..i_{2n-1}|, where compatible means equal within pairs."""
    if matching.n != n:
        raise ValueError("matching size does not match n")
    dim = d**n
    guard_dimension(dim)
    free = _index_digits(d, n)  # one free digit per pair
    full = np.empty((dim, 2 * n), dtype=np.int64)
    for pair_idx, (a, b) in enumerate(matching.pairs):
        full[:, a] = free[:, pair_idx]
        full[:, b] = free[:, pair_idx]
    pv = _place_values(d, n)
    rows = full[:, :n] @ pv
    cols = full[:, n:] @ pv
    mat = np.zeros((dim, dim))
    mat[rows, cols] = 1.0
    return Operator(mat, (d,) * n, (d,) * n)


# ---------------------------------------------------------------------------
# partial trace and commutant checks
# ---------------------------------------------------------------------------

def partial_trace(op: Operator, keep: Iterable[int]) -> Operator:
    """Trace out every subsystem not listed in keep (0-based, order preserved)."""
    if op.row_dims != op.col_dims:
        raise ValueError("partial trace requires row_dims == col_dims")
    dims = op.row_dims
    m = len(dims)
    keep_list = sorted(set(int(i) for i in keep))
    if keep_list and (keep_list[0] < 0 or keep_list[-1] >= m):
        raise IndexError(f"keep indices out of range for {m} subsystems")
    if len(keep_list) == m:
        return op
    if not keep_list:
        return Operator(np.array([[op.trace()]]), (1,), (1,))
    tensor = op.entries.reshape(dims + dims)
    traced = [i for i in range(m) if i not in keep_list]
    for count, idx in enumerate(traced):
        row_axis = idx - count
        col_axis = row_axis + (m - count)
        tensor = np.trace(tensor, axis1=row_axis, axis2=col_axis)
    kept_dims = tuple(dims[i] for i in keep_list)
    dim = prod(kept_dims)
    return Operator(tensor.reshape(dim, dim), kept_dims, kept_dims)


def conjugation_fixed_dimension(d: int, n: int) -> int:
    """(1/n!) sum_pi d^(2 cycles(pi)), the commutant dimension of the
    conjugation action of S_n on n copies of the d x d matrix algebra.

    Computed by brute-force enumeration so it stays an independent check of
    the closed form sym_dim(d**2, n)."""
    guard_permutations(n)
    total = 0
    for images in iter_permutations(range(n)):
        seen = [False] * n
        cycles = 0
        for start in range(n):
            if seen[start]:
                continue
            cycles += 1
            j = start
            while not seen[j]:
                seen[j] = True
                j = images[j]
        total += d ** (2 * cycles)
    quotient, remainder = divmod(total, factorial(n))
    if remainder:
        raise ArithmeticError("commutant dimension sum not divisible by n!")
    return quotient


def tensor_power_span_rank(d: int, n: int, samples: int, stream) -> int:
    """Numerical rank of the span of sampled tensor-power projectors phi^(x n).

    Stacks vectorized |phi><phi|^(x n) for Haar-random phi and counts singular
    values above 1e-8; the span of these operators is the full operator space
    of the symmetric subspace, so the expected answer is sym_dim(d, n)**2.
    """
    needed = sym_dim(d, n) ** 2 + 5
    if samples < needed:
        raise ValueError(f"need at least {needed} samples for (d, n)=({d}, {n})")
    dim = d**n
    guard_dimension(dim)
    gen = stream.generator()
    rows = np.empty((samples, dim * dim), dtype=complex)
    for i in range(samples):
        v = gen.standard_normal(d) + 1j * gen.standard_normal(d)
        v /= np.linalg.norm(v)
        w = v
        for _ in range(n - 1):
            w = np.kron(w, v)
        rows[i] = np.kron(w.conj(), w)  # column-stacked |w><w|
    svals = np.linalg.svd(rows, compute_uv=False)
    return int(np.sum(svals > 1e-8))
