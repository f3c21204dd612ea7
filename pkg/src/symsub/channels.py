"""Superoperator algebra and the three channel families built from the
symmetric projector: optimal cloning, optimal measure-and-prepare, and
partial trace, plus verification of the identity relating them.

Vectorization is column-stacking throughout: vec(A) stacks the columns of A,
so vec(AXB) = (B^T (x) A) vec(X) and a Kraus map sums conj(K) (x) K.

Each channel family comes in two representations.  The plain constructors
return superoperators on the full embedded space (d^n coordinates); the
``*_sym`` constructors return the same channel compressed to symmetric-subspace
coordinates through the type isometry.  The compressed matrices are small
(sym_dim-sided) and carry exactly the channel's action on symmetric inputs,
which is the only region where the channel definitions are pinned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod

import numpy as np

from .exactcomb import binomial, mp_clone_coefficient, sym_dim
from .guards import guard_dimension
from .tensorspace import Operator, _sym_projector_matrix, _type_isometry_matrix


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(matrix).T.reshape(-1)


def unvec(vector: np.ndarray, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Inverse of vec; square by default."""
    v = np.asarray(vector).reshape(-1)
    if shape is None:
        side = int(round(np.sqrt(v.size)))
        shape = (side, side)
    return v.reshape(shape[1], shape[0]).T


@dataclass(frozen=True)
class Superoperator:
    """Dense matrix acting on column-stacked operators."""

    matrix: np.ndarray
    in_dims: tuple[int, ...]
    out_dims: tuple[int, ...]

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "in_dims", tuple(int(d) for d in self.in_dims))
        object.__setattr__(self, "out_dims", tuple(int(d) for d in self.out_dims))
        if mat.shape != (self.out_dim**2, self.in_dim**2):
            raise ValueError(
                f"superoperator shape {mat.shape} does not match dims "
                f"{self.out_dims} <- {self.in_dims}"
            )

    @property
    def in_dim(self) -> int:
        return prod(self.in_dims)

    @property
    def out_dim(self) -> int:
        return prod(self.out_dims)


def identity_superoperator(dims: tuple[int, ...]) -> Superoperator:
    dim = prod(dims)
    return Superoperator(np.eye(dim * dim), dims, dims)


def kraus_superoperator(kraus_ops, in_dims, out_dims) -> Superoperator:
    """Assemble sum_i conj(K_i) (x) K_i."""
    din, dout = prod(in_dims), prod(out_dims)
    acc = np.zeros((dout * dout, din * din), dtype=complex)
    for op in kraus_ops:
        k = np.asarray(op, dtype=complex)
        acc += np.kron(k.conj(), k)
    return Superoperator(acc, tuple(in_dims), tuple(out_dims))


def compose(first: Superoperator, then: Superoperator) -> Superoperator:
    """Pipeline composition: apply ``first``, then ``then``."""
    if first.out_dims != then.in_dims:
        raise ValueError(f"dimension mismatch: {first.out_dims} vs {then.in_dims}")
    return Superoperator(then.matrix @ first.matrix, first.in_dims, then.out_dims)


def apply(s: Superoperator, rho: Operator) -> Operator:
    if rho.row_dims != s.in_dims or rho.col_dims != s.in_dims:
        raise ValueError(f"operator dims {rho.row_dims} do not match channel input {s.in_dims}")
    out = unvec(s.matrix @ vec(rho.entries), (s.out_dim, s.out_dim))
    return Operator(out, s.out_dims, s.out_dims)


def choi_matrix(s: Superoperator) -> np.ndarray:
    """Choi matrix sum_{pq} T(E_pq) (x) E_pq; PSD iff the map is completely positive."""
    din, dout = s.in_dim, s.out_dim
    choi = np.zeros((dout * din, dout * din), dtype=complex)
    for p in range(din):
        for q in range(din):
            col = s.matrix[:, p + q * din]  # vec(T(E_pq)) by column-stacking
            block = unvec(col, (dout, dout))
            unit = np.zeros((din, din))
            unit[p, q] = 1.0
            choi += np.kron(block, unit)
    return choi


def min_choi_eigenvalue(s: Superoperator) -> float:
    choi = choi_matrix(s)
    return float(np.linalg.eigvalsh((choi + choi.conj().T) / 2.0)[0])


def _guard_superoperator(out_dim: int, in_dim: int) -> None:
    # a superoperator matrix holds out_dim^2 * in_dim^2 entries; cap its side
    # product like an operator side so memory stays within the same budget
    guard_dimension(out_dim * in_dim, "superoperator")


def projection_superoperator(d: int, n: int) -> Superoperator:
    """rho -> Pi_sym rho Pi_sym on the full n-copy space."""
    _guard_superoperator(d**n, d**n)
    pi = _sym_projector_matrix(d, n)
    dims = (d,) * n if n > 0 else (1,)
    return Superoperator(np.kron(pi.T, pi), dims, dims)


def _dims(d: int, n: int) -> tuple[int, ...]:
    return (d,) * n if n > 0 else (1,)


# ---------------------------------------------------------------------------
# the three channel families, full-space representation
# ---------------------------------------------------------------------------

def clone_channel(d: int, n: int, k: int) -> Superoperator:
    """Optimal n -> n+k cloner: rho -> c Pi (rho (x) I^k) Pi with
    c = sym_dim(d,n)/sym_dim(d,n+k); trace preserving on symmetric inputs."""
    guard_dimension(d ** (n + k))
    _guard_superoperator(d ** (n + k), d**n)
    pi = _sym_projector_matrix(d, n + k)
    c = Fraction(sym_dim(d, n), sym_dim(d, n + k))
    dn, dk = d**n, d**k
    root = np.sqrt(float(c))
    eye = np.eye(dn)
    kraus = []
    for a in range(dk):
        embed = np.zeros((dn * dk, dn))
        embed[a::dk, :] = eye  # I (x) |a>
        kraus.append(root * (pi @ embed))
    return kraus_superoperator(kraus, _dims(d, n), _dims(d, n + k))


def mp_channel(d: int, n: int, k: int) -> Superoperator:
    """Optimal n -> k measure-and-prepare channel
    rho -> c tr_n [ Pi_sym^{(d, n+k)} (rho (x) I^k) ] with the single projector
    of the defining formula (the sandwiched variant is a different channel:
    it is the k-copy marginal of the cloner, with strictly larger fidelity).
    """
    guard_dimension(d ** (n + k))
    _guard_superoperator(d**k, d**n)
    pi = _sym_projector_matrix(d, n + k)
    c = float(Fraction(sym_dim(d, n), sym_dim(d, n + k)))
    dn, dk = d**n, d**k
    tensor = pi.reshape(dn, dk, dn, dk)
    # out[u, v] = c * sum_{b, b'} Pi[(b,u), (b',v)] rho[b', b]; as a matrix on
    # column-stacked inputs this is an axis shuffle of Pi.
    mat = c * tensor.transpose(3, 1, 0, 2).reshape(dk * dk, dn * dn)
    return Superoperator(mat, _dims(d, n), _dims(d, k))


def trace_channel(d: int, n: int, k: int) -> Superoperator:
    """Keep the first k of n subsystems, trace out the last n-k."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    guard_dimension(d**n)
    _guard_superoperator(d**k, d**n)
    dk, dr = d**k, d ** (n - k)
    kraus = []
    for b in range(dr):
        eb = np.zeros((1, dr))
        eb[0, b] = 1.0
        kraus.append(np.kron(np.eye(dk), eb))
    return kraus_superoperator(kraus, _dims(d, n), _dims(d, k))


# ---------------------------------------------------------------------------
# the same channels on symmetric-subspace coordinates
# ---------------------------------------------------------------------------

def clone_channel_sym(d: int, n: int, k: int) -> Superoperator:
    guard_dimension(d ** (n + k))
    v_in = _type_isometry_matrix(d, n)
    v_out = _type_isometry_matrix(d, n + k)
    c = Fraction(sym_dim(d, n), sym_dim(d, n + k))
    root = np.sqrt(float(c))
    dk = d**k
    kraus = [root * (v_out[a::dk, :].conj().T @ v_in) for a in range(dk)]
    return kraus_superoperator(kraus, (sym_dim(d, n),), (sym_dim(d, n + k),))


def mp_channel_sym(d: int, n: int, k: int) -> Superoperator:
    guard_dimension(d ** (n + k))
    pi = _sym_projector_matrix(d, n + k)
    v_in = _type_isometry_matrix(d, n)
    v_out = _type_isometry_matrix(d, k)
    c = float(Fraction(sym_dim(d, n), sym_dim(d, n + k)))
    dn, dk = d**n, d**k
    tensor = pi.reshape(dn, dk, dn, dk)
    # G[u,v,p,q] = sum_{x,y} Pi[x,u,y,v] V_in[y,p] conj(V_in[x,q])
    g = np.einsum("xuyv,yp,xq->uvpq", tensor, v_in, v_in.conj(), optimize=True)
    out = np.einsum("us,uvpq,vt->stpq", v_out.conj(), g, v_out, optimize=True)
    ds, dn_c = sym_dim(d, k), sym_dim(d, n)
    mat = c * out.transpose(1, 0, 3, 2).reshape(ds * ds, dn_c * dn_c)
    return Superoperator(mat, (dn_c,), (ds,))


def trace_channel_sym(d: int, n: int, k: int) -> Superoperator:
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    guard_dimension(d**n)
    v_in = _type_isometry_matrix(d, n)
    v_out = _type_isometry_matrix(d, k)
    dr = d ** (n - k)
    dk = d**k
    kraus = []
    for b in range(dr):
        idx = np.arange(dk) * dr + b
        kraus.append(v_out.conj().T @ v_in[idx, :])
    return kraus_superoperator(kraus, (sym_dim(d, n),), (sym_dim(d, k),))


def compress_superoperator(s: Superoperator, d: int, n_in: int, n_out: int) -> Superoperator:
    """Conjugate a full-space channel into symmetric coordinates on both ends."""
    v_in = _type_isometry_matrix(d, n_in)
    v_out = _type_isometry_matrix(d, n_out)
    left = np.kron(v_out.T, v_out.conj().T)
    right = np.kron(v_in.conj(), v_in)
    return Superoperator(left @ s.matrix @ right, (sym_dim(d, n_in),), (sym_dim(d, n_out),))


# ---------------------------------------------------------------------------
# exact scalar forms and the channel identity
# ---------------------------------------------------------------------------

def estimation_fidelity(d: int, n: int, k: int) -> Fraction:
    """Optimal estimation / measure-and-prepare fidelity sym_dim(d,n)/sym_dim(d,n+k)."""
    return Fraction(sym_dim(d, n), sym_dim(d, n + k))


def f_overlap(d: int, n: int, k: int, x: Fraction | int) -> Fraction:
    """Exact fidelity polynomial f(x) = c sum_s C(k,s)C(n,s)/C(n+k,k) x^s with
    c = sym_dim(d,n)/sym_dim(d,n+k); equals tr[beta^(x k) MP(alpha^(x n))] at
    x = |<alpha|beta>|^2."""
    xf = Fraction(x)
    acc = Fraction(0)
    power = Fraction(1)
    denom = binomial(n + k, k)
    for s in range(k + 1):
        acc += Fraction(binomial(k, s) * binomial(n, s), denom) * power
        power *= xf
    return estimation_fidelity(d, n, k) * acc


def chiribella_coefficient_identity(d: int, n: int, k: int, s: int) -> bool:
    """Exact check that the hypergeometric weight in f_overlap, rescaled by the
    cloner fidelities, is mp_clone_coefficient(d, n, k, s)."""
    lhs = (
        Fraction(sym_dim(d, n) * sym_dim(d, k), sym_dim(d, n + k) * sym_dim(d, s))
        * Fraction(binomial(k, s) * binomial(n, s), binomial(n + k, k))
    )
    return lhs == mp_clone_coefficient(d, n, k, s)


def _full_representation_feasible(d: int, n: int, k: int, entry_cap: int = 2**22) -> bool:
    dims = [d ** (2 * (n + k)), d ** (4 * n), d ** (4 * k)]
    return max(dims) <= entry_cap


def chiribella_sides(d: int, n: int, k: int, representation: str = "auto"):
    """Build both sides of the measure-and-prepare expansion
    MP_{n->k} = sum_s M_{k,s} clone_{s->k} o tr_{n-s} as superoperator matrices,
    restricted to symmetric inputs.

    representation: "sym" (symmetric coordinates), "full" (embedded space with
    symmetric-input projection pre-composed), or "auto".
    """
    if representation == "auto":
        representation = "full" if _full_representation_feasible(d, n, k) else "sym"
    if representation == "sym":
        lhs = mp_channel_sym(d, n, k)
        rhs = np.zeros_like(lhs.matrix)
        for s in range(0, min(n, k) + 1):
            weight = float(mp_clone_coefficient(d, n, k, s))
            piece = compose(trace_channel_sym(d, n, s), clone_channel_sym(d, s, k - s))
            rhs += weight * piece.matrix
        return lhs.matrix, rhs
    if representation == "full":
        proj = projection_superoperator(d, n)
        lhs = compose(proj, mp_channel(d, n, k))
        rhs = np.zeros_like(lhs.matrix)
        for s in range(0, min(n, k) + 1):
            weight = float(mp_clone_coefficient(d, n, k, s))
            piece = compose(proj, compose(trace_channel(d, n, s), clone_channel(d, s, k - s)))
            rhs += weight * piece.matrix
        return lhs.matrix, rhs
    raise ValueError(f"unknown representation {representation!r}")


def verify_chiribella(d: int, n: int, k: int, representation: str = "auto") -> float:
    """Frobenius residual between the two sides of the channel identity; also
    asserts the exact rational coefficient identity for every s."""
    for s in range(k + 1):
        if not chiribella_coefficient_identity(d, n, k, s):
            raise ArithmeticError(f"exact coefficient identity fails at (d,n,k,s)=({d},{n},{k},{s})")
    lhs, rhs = chiribella_sides(d, n, k, representation)
    return float(np.linalg.norm(lhs - rhs))
