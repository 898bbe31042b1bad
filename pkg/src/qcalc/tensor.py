"""Dense complex operators over ordered, labeled tensor-factor spaces.

Every operator carries its factor space, so tensor products, partial
traces and factor permutations can be driven by labels instead of raw
axis arithmetic.  All values are immutable after construction and all
operations are pure.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import (
    ConfigError,
    DisjointnessError,
    InvariantError,
    LabelError,
    ShapeError,
    SpaceError,
)

# Largest allowed product dimension; dense desk-scale verification only.
DIM_CAP = 64

ValidationKind = Literal["hermitian", "psd", "effect", "unitary"]


@dataclass(frozen=True)
class FactorSpace:
    """Ordered list of (label, dim) tensor factors."""

    factors: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        factors = tuple((str(lab), int(dim)) for lab, dim in self.factors)
        object.__setattr__(self, "factors", factors)
        labels = [lab for lab, _ in factors]
        if len(set(labels)) != len(labels):
            raise LabelError(f"duplicate factor labels in {labels}")
        if any(dim < 1 for _, dim in factors):
            raise InvariantError("every factor dimension must be >= 1")
        if self.total_dim > DIM_CAP:
            raise ConfigError(
                f"product dimension {self.total_dim} exceeds cap {DIM_CAP}"
            )

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    @property
    def total_dim(self) -> int:
        out = 1
        for _, dim in self.factors:
            out *= dim
        return out

    def dim_of(self, label: str) -> int:
        for lab, dim in self.factors:
            if lab == label:
                return dim
        raise LabelError(f"unknown factor label {label!r} in {self.labels}")

    def axis(self, label: str) -> int:
        for i, (lab, _) in enumerate(self.factors):
            if lab == label:
                return i
        raise LabelError(f"unknown factor label {label!r} in {self.labels}")

    def restrict(self, labels: Iterable[str]) -> "FactorSpace":
        """Sub-space of the given labels, keeping this space's order."""
        wanted = set(labels)
        missing = wanted - set(self.labels)
        if missing:
            raise LabelError(f"unknown factor labels {sorted(missing)}")
        return FactorSpace(tuple(f for f in self.factors if f[0] in wanted))

    def drop(self, labels: Iterable[str]) -> "FactorSpace":
        dropped = set(labels)
        missing = dropped - set(self.labels)
        if missing:
            raise LabelError(f"unknown factor labels {sorted(missing)}")
        return FactorSpace(tuple(f for f in self.factors if f[0] not in dropped))


def fspace(*factors: tuple[str, int]) -> FactorSpace:
    """Convenience constructor: fspace(("x", 2), ("q", 2))."""
    return FactorSpace(tuple(factors))


@dataclass(frozen=True, eq=False)
class Operator:
    """Complex square matrix tagged with its factor space."""

    space: FactorSpace
    entries: np.ndarray

    def __post_init__(self) -> None:
        mat = np.array(self.entries, dtype=np.complex128, copy=True, order="C")
        d = self.space.total_dim
        if mat.shape != (d, d):
            raise ShapeError(f"expected a {d}x{d} matrix, got shape {mat.shape}")
        if not np.all(np.isfinite(mat.view(np.float64))):
            raise InvariantError("operator entries must be finite")
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)

    # Minimal operator algebra; every result is a fresh Operator on the
    # same space.  Mixed-space arithmetic must go through tensor/embed.
    def _require_same_space(self, other: "Operator") -> None:
        if self.space.factors != other.space.factors:
            raise SpaceError(
                f"operands live on different spaces: "
                f"{self.space.factors} vs {other.space.factors}"
            )

    def __matmul__(self, other: "Operator") -> "Operator":
        self._require_same_space(other)
        return Operator(self.space, self.entries @ other.entries)

    def __add__(self, other: "Operator") -> "Operator":
        self._require_same_space(other)
        return Operator(self.space, self.entries + other.entries)

    def __sub__(self, other: "Operator") -> "Operator":
        self._require_same_space(other)
        return Operator(self.space, self.entries - other.entries)

    def __mul__(self, scalar: complex) -> "Operator":
        if isinstance(scalar, Operator):
            return NotImplemented  # use @ for operator products
        return Operator(self.space, self.entries * scalar)

    __rmul__ = __mul__

    def dag(self) -> "Operator":
        return Operator(self.space, self.entries.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def maxabs(self) -> float:
        return float(np.max(np.abs(self.entries))) if self.entries.size else 0.0


def identity(space: FactorSpace) -> Operator:
    return Operator(space, np.eye(space.total_dim))


def basis_projector(space: FactorSpace, index: int) -> Operator:
    mat = np.zeros((space.total_dim, space.total_dim))
    mat[index, index] = 1.0
    return Operator(space, mat)


def tensor(a: Operator, b: Operator) -> Operator:
    """Kronecker product in concatenated factor order.

    The two factor lists must carry disjoint labels; a collision signals
    that the operands do not describe independent subsystems.
    """
    overlap = set(a.space.labels) & set(b.space.labels)
    if overlap:
        raise DisjointnessError(f"factor labels {sorted(overlap)} appear on both sides")
    space = FactorSpace(a.space.factors + b.space.factors)
    return Operator(space, np.kron(a.entries, b.entries))


def partial_trace(a: Operator, labels: Iterable[str]) -> Operator:
    """Trace out the named factors; the rest keep their relative order."""
    traced = set(labels)
    unknown = traced - set(a.space.labels)
    if unknown:
        raise LabelError(f"unknown factor labels {sorted(unknown)}")
    if not traced:
        return Operator(a.space, a.entries)

    k = len(a.space.factors)
    dims = a.space.dims
    tens = a.entries.reshape(dims + dims)
    row = list(range(k))
    col = [k + i for i in range(k)]
    out = []
    for i, lab in enumerate(a.space.labels):
        if lab in traced:
            col[i] = row[i]  # repeated index: trace over this factor
        else:
            out.append(i)
    subscripts = row + col
    out_sub = out + [k + i for i in out]
    reduced = np.einsum(tens, subscripts, out_sub)
    new_space = a.space.drop(traced)
    d = new_space.total_dim
    return Operator(new_space, reduced.reshape(d, d))


def reindex(a: Operator, label_order: Sequence[str]) -> Operator:
    """Permute tensor factors into the given label order."""
    if sorted(label_order) != sorted(a.space.labels):
        raise LabelError(
            f"label order {list(label_order)} is not a permutation of {a.space.labels}"
        )
    perm = [a.space.axis(lab) for lab in label_order]
    k = len(perm)
    dims = a.space.dims
    tens = a.entries.reshape(dims + dims)
    tens = tens.transpose(perm + [k + p for p in perm])
    space = FactorSpace(tuple(a.space.factors[p] for p in perm))
    d = space.total_dim
    return Operator(space, tens.reshape(d, d))


def embed(a: Operator, target: FactorSpace) -> Operator:
    """Extend by identity onto the missing factors of `target` and reorder."""
    own = set(a.space.labels)
    missing = own - set(target.labels)
    if missing:
        raise LabelError(f"labels {sorted(missing)} not present in target space")
    for lab, dim in a.space.factors:
        if target.dim_of(lab) != dim:
            raise SpaceError(
                f"factor {lab!r} has dim {dim} but {target.dim_of(lab)} in target"
            )
    rest = target.drop(own)
    big = tensor(a, identity(rest)) if rest.factors else a
    return reindex(big, target.labels)


def conjugate(a: Operator, u: Operator, tol: float = 1e-9) -> Operator:
    """Return u a u^dag for a unitary u on the same space."""
    if dict(a.space.factors) != dict(u.space.factors):
        raise ShapeError(
            f"conjugation spaces differ: {a.space.factors} vs {u.space.factors}"
        )
    u_al = reindex(u, a.space.labels)
    if not validate(u_al, "unitary", tol):
        raise InvariantError("conjugating operator is not unitary")
    return Operator(a.space, u_al.entries @ a.entries @ u_al.entries.conj().T)


def validate(a: Operator, kind: ValidationKind, tol: float) -> bool:
    """Pure structural predicate; never raises on a failing matrix."""
    if tol <= 0:
        raise ConfigError("validation tolerance must be positive")
    mat = a.entries
    herm_dev = float(np.max(np.abs(mat - mat.conj().T)))
    if kind == "hermitian":
        return herm_dev <= tol
    if kind == "unitary":
        dev = np.abs(mat.conj().T @ mat - np.eye(mat.shape[0]))
        return float(np.max(dev)) <= tol
    if kind in ("psd", "effect"):
        if herm_dev > tol:
            return False
        eigs = np.linalg.eigvalsh((mat + mat.conj().T) / 2)
        if eigs[0] < -tol:
            return False
        if kind == "effect":
            return bool(eigs[-1] <= 1 + tol)
        return True
    raise ConfigError(f"unknown validation kind {kind!r}")


def sqrt_psd(a: Operator) -> Operator:
    """Hermitian square root; negative eigenvalue noise is clipped to zero."""
    herm = (a.entries + a.entries.conj().T) / 2
    eigs, vecs = np.linalg.eigh(herm)
    root = np.sqrt(np.clip(eigs, 0.0, None))
    return Operator(a.space, (vecs * root) @ vecs.conj().T)


def hermitian_basis(space: FactorSpace) -> list[Operator]:
    """d^2 Hermitian operators spanning the Hermitian operators on `space`.

    The set is orthonormal in the Hilbert-Schmidt inner product: the
    diagonal matrix units plus symmetrized and antisymmetrized pairs,
    so expansion coefficients are plain inner products and the Gram
    matrix is exactly the identity.
    """
    d = space.total_dim
    out: list[Operator] = []
    for i in range(d):
        mat = np.zeros((d, d), dtype=np.complex128)
        mat[i, i] = 1.0
        out.append(Operator(space, mat))
    for i in range(d):
        for j in range(i + 1, d):
            sym = np.zeros((d, d), dtype=np.complex128)
            sym[i, j] = sym[j, i] = 1 / np.sqrt(2)
            out.append(Operator(space, sym))
            asym = np.zeros((d, d), dtype=np.complex128)
            asym[i, j] = 1j / np.sqrt(2)
            asym[j, i] = -1j / np.sqrt(2)
            out.append(Operator(space, asym))
    return out


def as_seed(seed) -> int:
    """Normalize any 64-bit integer (signed or not) to generator entropy."""
    return int(seed) & 0xFFFFFFFFFFFFFFFF


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(as_seed(seed))


def _ginibre(rng: np.random.Generator, d: int) -> np.ndarray:
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def random_unitary(space: FactorSpace, seed) -> Operator:
    """Haar-distributed unitary (QR of a Gaussian matrix, phases fixed)."""
    rng = _rng(seed)
    q, r = np.linalg.qr(_ginibre(rng, space.total_dim))
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return Operator(space, q * phases)


def random_density(space: FactorSpace, seed) -> Operator:
    """Random trace-one positive operator (normalized Wishart)."""
    rng = _rng(seed)
    g = _ginibre(rng, space.total_dim)
    rho = g @ g.conj().T
    return Operator(space, rho / np.trace(rho).real)


def random_effect(space: FactorSpace, seed) -> Operator:
    """Random effect: Haar basis with uniform spectrum in [0, 1]."""
    rng = _rng(seed)
    u = random_unitary(space, rng).entries
    vals = rng.uniform(0.0, 1.0, space.total_dim)
    return Operator(space, (u * vals) @ u.conj().T)


def random_effect_bindle(space: FactorSpace, k: int, seed) -> list[Operator]:
    """k effects summing to the identity (normalized positive decomposition)."""
    if k < 1:
        raise ConfigError("a bindle needs at least one element")
    rng = _rng(seed)
    d = space.total_dim
    parts = []
    for _ in range(k):
        g = _ginibre(rng, d)
        parts.append(g @ g.conj().T)
    total = np.sum(parts, axis=0)
    eigs, vecs = np.linalg.eigh((total + total.conj().T) / 2)
    inv_root = (vecs / np.sqrt(eigs)) @ vecs.conj().T
    return [Operator(space, inv_root @ p @ inv_root) for p in parts]
