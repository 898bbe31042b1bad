"""Orbits, co-orbits, bindles, and the operations that relate them.

An orbit is a positive operator whose trace (its norm) is the
probability that the circumstance making the orbit pertinent actually
comes about; a pegged orbit has norm one.  A co-orbit is an effect
operator standing for one possible result of an observation, and a
bindle collects all results of one observation, its effects summing to
norm times the identity.  The Born pairing born(p, s) = tr(p s) is the
single probability rule; there is no collapse operation anywhere.
Conditioning happens only through the two division operations, both
realized as a symmetric square-root sandwich followed by a partial
trace over the observed factors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateOrbitError,
    InvariantError,
    LabelError,
    SpaceError,
)
from .tensor import (
    FactorSpace,
    Operator,
    conjugate,
    embed,
    partial_trace,
    reindex,
    sqrt_psd,
    tensor,
    validate,
)

# Structural validation tolerance; identity checks pass at the same
# threshold, scenario failures are declared only above 1e-3.
STRUCT_TOL = 1e-9
# Below this norm, conditioning is treated as conditioning on a
# probability-zero result, which is undefined.
NORM_EPS = 1e-12


class Bambino(float):
    """A real number in the closed unit interval."""

    def __new__(cls, value: float) -> "Bambino":
        val = float(value)
        if not 0.0 <= val <= 1.0:
            raise InvariantError(f"value {val} outside the unit interval")
        return super().__new__(cls, val)


@dataclass(frozen=True, eq=False)
class Orbit:
    """Positive operator with trace in (0, 1]; the trace is its norm."""

    op: Operator
    pegged: bool = False

    def __post_init__(self) -> None:
        if not validate(self.op, "psd", STRUCT_TOL):
            raise InvariantError("orbit operator is not positive semidefinite")
        tr = self.op.trace().real
        if not 0.0 < tr <= 1.0 + STRUCT_TOL:
            raise InvariantError(f"orbit norm {tr} outside (0, 1]")
        if self.pegged and abs(tr - 1.0) > STRUCT_TOL:
            raise InvariantError(f"pegged orbit has norm {tr} != 1")

    @property
    def space(self) -> FactorSpace:
        return self.op.space

    @property
    def norm(self) -> Bambino:
        return Bambino(min(1.0, self.op.trace().real))


@dataclass(frozen=True, eq=False)
class CoOrbit:
    """Effect operator (0 <= E <= I) standing for one observation result."""

    eff: Operator

    def __post_init__(self) -> None:
        if not validate(self.eff, "effect", STRUCT_TOL):
            raise InvariantError("co-orbit operator is not an effect")

    @property
    def space(self) -> FactorSpace:
        return self.eff.space


@dataclass(frozen=True, eq=False)
class Bindle:
    """All possible results of one observation.

    The effects must share one factor space and sum to norm times the
    identity with norm in (0, 1].  Duplicate elements are permitted:
    distinct results of an observation may carry the same information.
    """

    elements: tuple[CoOrbit, ...]
    norm: Bambino = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        elements = tuple(self.elements)
        if not elements:
            raise InvariantError("a bindle needs at least one element")
        first = elements[0].space
        aligned = [elements[0]]
        for element in elements[1:]:
            if dict(element.space.factors) != dict(first.factors):
                raise SpaceError("bindle elements live on different spaces")
            aligned.append(CoOrbit(reindex(element.eff, first.labels)))
        object.__setattr__(self, "elements", tuple(aligned))
        total = np.sum([e.eff.entries for e in aligned], axis=0)
        inferred = float(np.trace(total).real) / first.total_dim
        norm = inferred if self.norm is None else float(self.norm)
        dev = float(np.max(np.abs(total - norm * np.eye(first.total_dim))))
        if dev > STRUCT_TOL:
            raise InvariantError(
                f"bindle elements sum to norm*I only within {dev:.3e}"
            )
        if not 0.0 < norm <= 1.0 + STRUCT_TOL:
            raise InvariantError(f"bindle norm {norm} outside (0, 1]")
        object.__setattr__(self, "norm", Bambino(min(1.0, norm)))

    @property
    def space(self) -> FactorSpace:
        return self.elements[0].space

    @property
    def labels(self) -> tuple[str, ...]:
        return self.space.labels

    def __len__(self) -> int:
        return len(self.elements)


def born(p: Orbit, s: CoOrbit) -> float:
    """Probability pairing tr(p s); the arguments must share one space.

    The value is invariant under reordering of the factors and under
    joint unitary conjugation of both arguments, so it refers to no
    particular time.
    """
    if dict(p.space.factors) != dict(s.space.factors):
        raise SpaceError(
            f"born pairing across different spaces: "
            f"{p.space.factors} vs {s.space.factors}"
        )
    eff = reindex(s.eff, p.space.labels)
    return float(np.trace(p.op.entries @ eff.entries).real)


def extend_coorbit(s: CoOrbit, target: FactorSpace) -> CoOrbit:
    """Trivially extend a result co-orbit onto a larger factor space."""
    return CoOrbit(embed(s.eff, target))


def past_product(p: Orbit, q: Orbit) -> Orbit:
    """Combine orbits of independently arisen systems.

    Disjoint factor labels are the stand-in for past distinctness; a
    collision raises DisjointnessError.  Norms multiply.
    """
    return Orbit(tensor(p.op, q.op), pegged=p.pegged and q.pegged)


def future_product(s: CoOrbit, t: CoOrbit) -> CoOrbit:
    """Combine results of observations that do not interfere.

    Disjoint factor labels are the stand-in for future distinctness.
    The caller asserts noninterference of the two observations; the
    product only defines the joint probability when that holds.
    """
    return CoOrbit(tensor(s.eff, t.eff))


def scale(a: float, x):
    """Multiply an orbit or co-orbit by a constant in [0, 1]."""
    factor = Bambino(a)
    if isinstance(x, Orbit):
        if factor == 1.0:
            return x
        if factor == 0.0:
            raise DegenerateOrbitError("zero-norm orbits are not representable")
        return Orbit(factor * x.op, pegged=False)
    if isinstance(x, CoOrbit):
        if factor == 1.0:
            return x
        return CoOrbit(factor * x.eff)
    raise InvariantError(f"cannot scale object of type {type(x).__name__}")


def normalize(x: Orbit) -> Orbit:
    """Rescale to norm one (the orbit usable once its circumstance holds)."""
    tr = x.op.trace().real
    if tr <= NORM_EPS:
        raise DegenerateOrbitError(f"orbit norm {tr} too small to normalize")
    return Orbit((1.0 / tr) * x.op, pegged=True)


def divide_orbit(p: Orbit, s: CoOrbit) -> Orbit:
    """First division p // s: condition an orbit on an observed result.

    s must act on a proper nonempty subset of p's factors; the result
    lives on the remaining factors and carries the joint-probability
    normalization: its norm is born(p, s extended), and for every
    co-orbit t on the remaining factors,

        born(p // s, t) == born(p, s (x) t).

    Use normalize() explicitly to pass to conditional probabilities.
    """
    inner = set(s.space.labels)
    outer = set(p.space.labels)
    if not inner or not inner < outer:
        raise LabelError(
            f"division needs a proper nonempty factor subset, got {sorted(inner)} "
            f"inside {sorted(outer)}"
        )
    root = embed(sqrt_psd(s.eff), p.space)
    red = partial_trace(root @ p.op @ root, inner)
    if red.trace().real <= NORM_EPS:
        raise DegenerateOrbitError("conditioning on a probability-zero result")
    return Orbit(red, pegged=False)


def condition(p: Orbit, s: CoOrbit) -> Orbit:
    """First division without discarding factors.

    Same square-root sandwich as divide_orbit but the observed factors
    are kept, so the result stays on p's full space.  s may act on any
    subset of p's factors, including all of them.
    """
    if not set(s.space.labels) <= set(p.space.labels):
        raise LabelError(
            f"conditioning labels {s.space.labels} not within {p.space.labels}"
        )
    root = embed(sqrt_psd(s.eff), p.space)
    out = root @ p.op @ root
    if out.trace().real <= NORM_EPS:
        raise DegenerateOrbitError("conditioning on a probability-zero result")
    return Orbit(out, pegged=False)


def divide_coorbit(s: CoOrbit, q: Orbit) -> CoOrbit:
    """Second division s // q: reduce a joint result by a known instrument.

    q must act on a proper nonempty subset of s's factors; the result
    is an effect on the remaining factors, bounded by norm(q) * I, and
    satisfies the defining identity

        born(p, s // q) == born(p (x) q, s)

    for every orbit p on the remaining factors.
    """
    inner = set(q.space.labels)
    outer = set(s.space.labels)
    if not inner or not inner < outer:
        raise LabelError(
            f"division needs a proper nonempty factor subset, got {sorted(inner)} "
            f"inside {sorted(outer)}"
        )
    root = embed(sqrt_psd(q.op), s.space)
    red = partial_trace(root @ s.eff @ root, inner)
    return CoOrbit(red)


def consonant(b1: Bindle, b2: Bindle) -> bool:
    """Whether the two observations can be made together without interference.

    Realized as disjoint factor support.  A bindle is never consonant
    with itself: the same observation cannot be made twice.
    """
    return not set(b1.labels) & set(b2.labels)


@dataclass(frozen=True, eq=False)
class InstrumentedObservation:
    """An observation of an examinee made with the help of an instrument.

    The instrument orbit lives on its own factors, the coupling unitary
    acts on examinee plus instrument factors and packages the whole
    interaction, and the look is a primitive bindle whose effects are
    stated in the post-coupling picture on designated look factors.
    """

    instrument: Orbit
    coupling: Operator
    look: Bindle

    def __post_init__(self) -> None:
        if not validate(self.coupling, "unitary", STRUCT_TOL):
            raise InvariantError("coupling operator is not unitary")
        joint = set(self.coupling.space.labels)
        inst = set(self.instrument.space.labels)
        if not inst or not inst < joint:
            raise LabelError("instrument factors must be a proper subset of the coupling's")
        if not set(self.look.labels) <= joint:
            raise LabelError("look factors must lie within the coupling's factors")
        for lab, dim in self.instrument.space.factors:
            if self.coupling.space.dim_of(lab) != dim:
                raise SpaceError(f"instrument factor {lab!r} dimension mismatch")
        for lab, dim in self.look.space.factors:
            if self.coupling.space.dim_of(lab) != dim:
                raise SpaceError(f"look factor {lab!r} dimension mismatch")

    @property
    def joint_space(self) -> FactorSpace:
        return self.coupling.space

    @property
    def instrument_labels(self) -> tuple[str, ...]:
        return self.instrument.space.labels

    @property
    def examinee_labels(self) -> tuple[str, ...]:
        inst = set(self.instrument_labels)
        return tuple(l for l in self.coupling.space.labels if l not in inst)

    @property
    def examinee_space(self) -> FactorSpace:
        return self.coupling.space.restrict(self.examinee_labels)

    def heisenberg(self, s: CoOrbit) -> CoOrbit:
        """Pull a post-coupling effect back to the reference time."""
        ext = embed(s.eff, self.joint_space)
        return CoOrbit(conjugate(ext, self.coupling.dag()))


def reduce_look(inst: InstrumentedObservation) -> Bindle:
    """The instrumented observation's bindle {s_i // q} on the examinee.

    Each look element is pulled back through the coupling and divided
    by the instrument; the resulting bindle has norm equal to the look
    norm times the instrument norm.
    """
    reduced = tuple(
        divide_coorbit(inst.heisenberg(s), inst.instrument) for s in inst.look.elements
    )
    return Bindle(reduced)
