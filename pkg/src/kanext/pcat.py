"""Resource objects, reachability oracles, monotones, and preorder collapse.

A resource theory enters the engine as a reachability oracle: a decision
procedure for "is there a free transformation A -> B".  Monotones are value
assignments tagged covariant (values grow along free arrows) or
contravariant (values shrink).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .prob import INF, ExtValue

COVARIANT = "covariant"
CONTRAVARIANT = "contravariant"

# Slack for order checks on evaluated monotones.
VALUE_SLACK = 1e-9


class OracleSoundnessError(RuntimeError):
    """A reachability oracle returned an intransitive or irreflexive relation."""


def ext_leq(a: ExtValue, b: ExtValue, slack: float = 0.0) -> bool:
    """a <= b with slack, without doing arithmetic on infinity."""
    if b == INF:
        return True
    if a == INF:
        return False
    return a <= b + slack


@dataclass(frozen=True)
class ResourceRef:
    """A resource: a theory id plus the theory's object payload."""

    theory_id: str
    payload: Any

    def describe(self) -> str:
        label = getattr(self.payload, "label", None)
        if label:
            return label
        payload = self.payload
        if hasattr(payload, "weights"):
            body = "[" + ", ".join(f"{w:.6g}" for w in payload.weights) + "]"
        elif isinstance(payload, tuple):
            body = "pair"
        elif hasattr(payload, "dim"):
            body = f"dim={payload.dim}"
        elif hasattr(payload, "dims"):
            body = f"dims={payload.dims}"
        else:
            body = repr(payload)
        return f"{self.theory_id}:{body}"


@dataclass(frozen=True)
class Decision:
    """Outcome of one reachability query.

    ``exact=False`` marks sampled or family-restricted answers: a negative
    then means "not certified", not "impossible".
    """

    reachable: bool
    witness: Any = None
    exact: bool = True


@dataclass(frozen=True)
class ReachabilityOracle:
    """Free-reachability decider for one theory.

    ``exact`` is the oracle-level claim that every decision is definitive;
    individual decisions may still downgrade themselves via Decision.exact.
    """

    theory_id: str
    decide: Callable[[ResourceRef, ResourceRef], Decision]
    exact: bool = True


@dataclass(frozen=True)
class MonotoneSpec:
    """A named value assignment with its variance along free arrows."""

    name: str
    evaluate: Callable[[ResourceRef], ExtValue]
    variance: str

    def __post_init__(self):
        if self.variance not in (COVARIANT, CONTRAVARIANT):
            raise ValueError(f"unknown variance {self.variance!r}")


@dataclass(frozen=True)
class Violation:
    """One ordered pair on which a monotone disrespects reachability."""

    source: ResourceRef
    target: ResourceRef
    value_source: ExtValue
    value_target: ExtValue


@dataclass(frozen=True)
class PreorderRelation:
    """Reachability restricted to a finite object list; checked on build."""

    objects: tuple[ResourceRef, ...]
    relation: np.ndarray

    def __post_init__(self):
        rel = np.asarray(self.relation, dtype=bool)
        n = len(self.objects)
        if rel.shape != (n, n):
            raise ValueError(f"relation shape {rel.shape} vs {n} objects")
        for i in range(n):
            if not rel[i, i]:
                raise OracleSoundnessError(
                    f"irreflexive oracle: object {i} does not reach itself"
                )
        composed = rel @ rel
        bad = composed & ~rel
        if bad.any():
            i, k = map(int, np.argwhere(bad)[0])
            j = int(np.nonzero(rel[i] & rel[:, k])[0][0])
            raise OracleSoundnessError(
                f"intransitive oracle: {i} -> {j} -> {k} but not {i} -> {k}"
            )
        rel.setflags(write=False)
        object.__setattr__(self, "relation", rel)
        object.__setattr__(self, "objects", tuple(self.objects))

    def to_json(self) -> dict:
        return {
            "objects": [ref.describe() for ref in self.objects],
            "adjacency": self.relation.astype(int).tolist(),
        }

    def to_dot(self) -> str:
        lines = ["digraph preorder {"]
        for idx, ref in enumerate(self.objects):
            lines.append(f'  n{idx} [label={json.dumps(ref.describe())}];')
        n = len(self.objects)
        for i in range(n):
            for j in range(n):
                if i != j and self.relation[i, j]:
                    lines.append(f"  n{i} -> n{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def preorder_collapse(
    oracle: ReachabilityOracle, objects: list[ResourceRef]
) -> PreorderRelation:
    """Forget witnesses, keep reachability, over a finite object list.

    Requires an exact oracle; an inexact relation is not a preorder claim.
    """
    if not oracle.exact:
        raise ValueError("preorder collapse requires an exact oracle")
    n = len(objects)
    rel = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            d = oracle.decide(objects[i], objects[j])
            if not d.exact:
                raise ValueError(
                    f"oracle returned an inexact decision for pair ({i}, {j})"
                )
            rel[i, j] = d.reachable
    return PreorderRelation(tuple(objects), rel)


def check_monotone(
    oracle: ReachabilityOracle,
    mono: MonotoneSpec,
    pairs: list[tuple[ResourceRef, ResourceRef]],
) -> list[Violation]:
    """Collect order violations of a monotone over reachable pairs."""
    violations = []
    for a, b in pairs:
        if not oracle.decide(a, b).reachable:
            continue
        va = mono.evaluate(a)
        vb = mono.evaluate(b)
        if mono.variance == COVARIANT:
            ok = ext_leq(va, vb, VALUE_SLACK)
        else:
            ok = ext_leq(vb, va, VALUE_SLACK)
        if not ok:
            violations.append(Violation(a, b, va, vb))
    return violations
