"""Pointwise minimal and maximal extensions of monotones along functors.

With a posetal value codomain the slice categories never need to be built:
an extension at a target object is an inf or sup of monotone values over the
candidates whose images are connected to it by a free arrow.  Which bound,
and in which direction the arrow points, depends on the variance:

    minimal, covariant:      inf  { M(X) : Y -> K(X) free },  empty -> inf
    minimal, contravariant:  sup  { M(X) : Y -> K(X) free },  empty -> 0
    maximal, covariant:      sup  { M(X) : K(X) -> Y free },  empty -> 0
    maximal, contravariant:  inf  { M(X) : K(X) -> Y free },  empty -> inf

The empty-set constants are the initial (0) and terminal (inf) objects of
the value poset.  Infinity is never summed with anything, only compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .prob import INF, ExtValue, ext_to_json
from .pcat import (
    COVARIANT,
    MonotoneSpec,
    ReachabilityOracle,
    ResourceRef,
    ext_leq,
)

SANDWICH_SLACK = 1e-9


class EnumerationBudgetError(ValueError):
    """Brute-force competitor enumeration would exceed the budget."""


@dataclass(frozen=True)
class FunctorMap:
    """Object map of a functor between theories; free arrows map to free arrows.

    ``preserves_free`` is an assertion hook for tests: given a free-arrow
    witness in the source, it reports whether the image arrow is free.
    """

    name: str
    source_theory: str
    target_theory: str
    map_object: Callable[[ResourceRef], ResourceRef]
    preserves_free: Callable[[Any], bool] | None = None


@dataclass(frozen=True)
class ExtensionProblem:
    """A monotone, a functor into the target theory, the target's oracle,
    and the finite candidate family the sweep ranges over.

    ``candidates_complete`` is the caller's claim that the candidates cover
    every admissible source object, making sweep results exact rather than
    one-sided bounds.
    """

    monotone: MonotoneSpec
    functor: FunctorMap
    target_oracle: ReachabilityOracle
    candidates: tuple[ResourceRef, ...]
    candidates_complete: bool = False

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))


@dataclass(frozen=True)
class ExtensionResult:
    value: ExtValue
    witness: tuple[ResourceRef, Any] | None
    examined: int
    exact: bool

    def to_json(self) -> dict:
        doc: dict = {
            "value": ext_to_json(self.value),
            "examined": self.examined,
            "exact": self.exact,
        }
        if self.witness is not None:
            doc["witness"] = self.witness[0].describe()
        return doc


def _admissible(prob: ExtensionProblem, y: ResourceRef, toward_image: bool):
    """Candidates connected to y, with decision witnesses and values.

    ``toward_image`` selects the arrow direction: y -> K(X) when true
    (minimal extensions), K(X) -> y otherwise (maximal extensions).
    """
    found = []
    all_exact = True
    for x in prob.candidates:
        image = prob.functor.map_object(x)
        if toward_image:
            d = prob.target_oracle.decide(y, image)
        else:
            d = prob.target_oracle.decide(image, y)
        if not d.exact:
            all_exact = False
        if d.reachable:
            found.append((x, d.witness, prob.monotone.evaluate(x)))
    return found, all_exact


def _pick(found, value):
    for x, witness, v in found:
        if v == value:
            return (x, witness)
    return None


def minimal_extension(prob: ExtensionProblem, y: ResourceRef) -> ExtensionResult:
    """Best value reachable from y among candidate images."""
    found, all_exact = _admissible(prob, y, toward_image=True)
    exact = all_exact and prob.candidates_complete
    covariant = prob.monotone.variance == COVARIANT
    if not found:
        return ExtensionResult(INF if covariant else 0.0, None, len(prob.candidates), exact)
    values = [v for _, _, v in found]
    value = min(values) if covariant else max(values)
    return ExtensionResult(value, _pick(found, value), len(prob.candidates), exact)


def maximal_extension(prob: ExtensionProblem, y: ResourceRef) -> ExtensionResult:
    """Best value among candidates whose images reach y."""
    found, all_exact = _admissible(prob, y, toward_image=False)
    exact = all_exact and prob.candidates_complete
    covariant = prob.monotone.variance == COVARIANT
    if not found:
        return ExtensionResult(0.0 if covariant else INF, None, len(prob.candidates), exact)
    values = [v for _, _, v in found]
    value = max(values) if covariant else min(values)
    return ExtensionResult(value, _pick(found, value), len(prob.candidates), exact)


@dataclass(frozen=True)
class SandwichSample:
    source: ResourceRef
    minimal: ExtValue
    value: ExtValue
    maximal: ExtValue
    ok: bool


@dataclass(frozen=True)
class SandwichReport:
    samples: tuple[SandwichSample, ...]
    passed: bool
    equalities: int

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checked": len(self.samples),
            "equalities": self.equalities,
            "violations": [
                {
                    "source": s.source.describe(),
                    "minimal": ext_to_json(s.minimal),
                    "value": ext_to_json(s.value),
                    "maximal": ext_to_json(s.maximal),
                }
                for s in self.samples
                if not s.ok
            ],
        }


def verify_reduction(
    prob: ExtensionProblem, samples: list[ResourceRef]
) -> SandwichReport:
    """Check the sandwich min-ext <= M <= max-ext on images of samples.

    Orientation flips for contravariant monotones.  Guaranteed whenever each
    sample appears among the candidates and the oracle is exact; reported
    honestly either way.
    """
    covariant = prob.monotone.variance == COVARIANT
    rows = []
    equalities = 0
    for x in samples:
        y = prob.functor.map_object(x)
        lo = minimal_extension(prob, y).value
        hi = maximal_extension(prob, y).value
        v = prob.monotone.evaluate(x)
        if covariant:
            ok = ext_leq(lo, v, SANDWICH_SLACK) and ext_leq(v, hi, SANDWICH_SLACK)
        else:
            ok = ext_leq(v, lo, SANDWICH_SLACK) and ext_leq(hi, v, SANDWICH_SLACK)
        if ext_leq(lo, hi, SANDWICH_SLACK) and ext_leq(hi, lo, SANDWICH_SLACK):
            equalities += 1
        rows.append(SandwichSample(x, lo, v, hi, ok))
    return SandwichReport(tuple(rows), all(r.ok for r in rows), equalities)


@dataclass(frozen=True)
class MonotonicityCheck:
    lower: ResourceRef
    upper: ResourceRef
    minimal_ok: bool
    maximal_ok: bool

    @property
    def ok(self) -> bool:
        return self.minimal_ok and self.maximal_ok


@dataclass(frozen=True)
class MonotonicityReport:
    checks: tuple[MonotonicityCheck, ...]
    passed: bool

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checked": len(self.checks),
            "violations": [
                {"from": c.lower.describe(), "to": c.upper.describe()}
                for c in self.checks
                if not c.ok
            ],
        }


def verify_monotonicity(
    prob: ExtensionProblem, target_pairs: list[tuple[ResourceRef, ResourceRef]]
) -> MonotonicityReport:
    """Extensions must respect each supplied free arrow Y -> Y'."""
    covariant = prob.monotone.variance == COVARIANT
    checks = []
    for y, y2 in target_pairs:
        if not prob.target_oracle.decide(y, y2).reachable:
            raise ValueError(
                f"pair ({y.describe()}, {y2.describe()}) is not a free arrow"
            )
        order = (lambda a, b: ext_leq(a, b, SANDWICH_SLACK)) if covariant else (
            lambda a, b: ext_leq(b, a, SANDWICH_SLACK)
        )
        checks.append(
            MonotonicityCheck(
                y,
                y2,
                order(minimal_extension(prob, y).value, minimal_extension(prob, y2).value),
                order(maximal_extension(prob, y).value, maximal_extension(prob, y2).value),
            )
        )
    return MonotonicityReport(tuple(checks), all(c.ok for c in checks))


@dataclass(frozen=True)
class OptimalityReport:
    passed: bool
    competitors_minimal: int
    competitors_maximal: int
    violations: tuple[str, ...]
    minimal_values: tuple[ExtValue, ...]
    maximal_values: tuple[ExtValue, ...]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "competitors_minimal": self.competitors_minimal,
            "competitors_maximal": self.competitors_maximal,
            "violations": list(self.violations),
        }


def _enumerate_monotones(relation, grid, bounds, lower_bound_mode, covariant):
    """DFS over grid assignments respecting the free relation and per-object
    bound constraints; prunes as soon as a partial assignment fails."""
    n = relation.shape[0]
    values = [None] * n

    def respects(t, g):
        b = bounds[t]
        if b is not None:
            if lower_bound_mode and not ext_leq(b, g):
                return False
            if not lower_bound_mode and not ext_leq(g, b):
                return False
        for s in range(t):
            if relation[s, t] and values[s] is not None:
                ordered = ext_leq(values[s], g) if covariant else ext_leq(g, values[s])
                if not ordered:
                    return False
            if relation[t, s] and values[s] is not None:
                ordered = ext_leq(g, values[s]) if covariant else ext_leq(values[s], g)
                if not ordered:
                    return False
        return True

    def walk(t):
        if t == n:
            yield tuple(values)
            return
        for g in grid:
            if respects(t, g):
                values[t] = g
                yield from walk(t + 1)
                values[t] = None

    yield from walk(0)


def verify_optimality_bruteforce(
    prob: ExtensionProblem,
    target_objects: list[ResourceRef],
    value_grid: tuple[ExtValue, ...],
    budget: int = 5_000_000,
) -> OptimalityReport:
    """Enumerate every competitor monotone on a finite target theory and
    confirm the universal property of both extensions.

    A competitor G assigns grid values to target objects, respects the free
    relation per the variance, and obeys the hypothesis on images of the
    candidates: G(K X) bounded by M(X) from the side appropriate to the
    extension being tested.  Every such G must be dominated by the minimal
    extension and must dominate the maximal one (covariant case; both flip
    for contravariant monotones).  Comparisons are exact.
    """
    n = len(target_objects)
    if len(value_grid) ** n > budget:
        raise EnumerationBudgetError(
            f"{len(value_grid)}^{n} assignments exceed budget {budget}"
        )
    covariant = prob.monotone.variance == COVARIANT
    relation = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            relation[i, j] = prob.target_oracle.decide(
                target_objects[i], target_objects[j]
            ).reachable

    index_of = {id(ref): i for i, ref in enumerate(target_objects)}

    def locate(image: ResourceRef) -> int:
        if id(image) in index_of:
            return index_of[id(image)]
        for i, ref in enumerate(target_objects):
            if ref == image:
                return i
        raise ValueError("functor image is not among the target objects")

    images = [locate(prob.functor.map_object(x)) for x in prob.candidates]
    mvals = [prob.monotone.evaluate(x) for x in prob.candidates]

    minimal_values = [minimal_extension(prob, y).value for y in target_objects]
    maximal_values = [maximal_extension(prob, y).value for y in target_objects]

    violations: list[str] = []

    # Hypothesis for the minimal extension: G(K X) <= M(X) for covariant
    # monotones, >= for contravariant.  Collapse per-object to one bound.
    def image_bounds(upper: bool):
        bounds: list[ExtValue | None] = [None] * n
        for t, m in zip(images, mvals):
            if bounds[t] is None:
                bounds[t] = m
            elif upper:
                bounds[t] = min(bounds[t], m)
            else:
                bounds[t] = max(bounds[t], m)
        return bounds

    min_hypothesis_upper = covariant  # contravariant flips the inequality
    count_min = 0
    for g in _enumerate_monotones(
        relation,
        value_grid,
        image_bounds(upper=min_hypothesis_upper),
        lower_bound_mode=not min_hypothesis_upper,
        covariant=covariant,
    ):
        count_min += 1
        for t in range(n):
            dominated = (
                ext_leq(g[t], minimal_values[t])
                if covariant
                else ext_leq(minimal_values[t], g[t])
            )
            if not dominated:
                violations.append(
                    f"minimal extension beaten at object {t}: "
                    f"G={g[t]} vs {minimal_values[t]}"
                )

    max_hypothesis_upper = not covariant
    count_max = 0
    for g in _enumerate_monotones(
        relation,
        value_grid,
        image_bounds(upper=max_hypothesis_upper),
        lower_bound_mode=not max_hypothesis_upper,
        covariant=covariant,
    ):
        count_max += 1
        for t in range(n):
            dominates = (
                ext_leq(maximal_values[t], g[t])
                if covariant
                else ext_leq(g[t], maximal_values[t])
            )
            if not dominates:
                violations.append(
                    f"maximal extension beaten at object {t}: "
                    f"G={g[t]} vs {maximal_values[t]}"
                )

    return OptimalityReport(
        passed=not violations,
        competitors_minimal=count_min,
        competitors_maximal=count_max,
        violations=tuple(violations),
        minimal_values=tuple(minimal_values),
        maximal_values=tuple(maximal_values),
    )
