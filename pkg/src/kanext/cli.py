"""Config-driven command line front door.

One JSON config document (file path or stdin) selects the command and all
parameters; the only flags are --config, --seed, and --out, so a run is
fully reproducible from its config.  Commands:

    reach    decide free reachability between two objects of a theory
    extend   compute both extensions of a monotone at a target object
    verify   run a named property check; exit 1 on any violation
    lorenz   export Lorenz curves to CSV, with a dominance summary in
             two-distribution mode

Exit codes: 0 success/pass, 1 property violation, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bf_oracle import random_toy_problem
from .kan import (
    ExtensionProblem,
    maximal_extension,
    minimal_extension,
    verify_monotonicity,
    verify_optimality_bruteforce,
    verify_reduction,
)
from .lp import exists_joint_stochastic_map, exists_uniform_map
from .pcat import CONTRAVARIANT, COVARIANT, ResourceRef, ext_leq
from .prob import (
    Dist,
    InvariantViolation,
    ext_to_json,
    kl_divergence,
    lorenz_curve,
    majorizes,
    random_stochastic,
    random_uniform_matrix,
    simplex_grid,
)
from .quantum import (
    BipartitePure,
    DensityMatrix,
    complex_matrix_from_json,
    eig_hermitian,
    measurement_entropy_search,
    random_density,
    random_unitary,
    spectral_entropy,
)
from .theories import RAND_UNIFORM, default_registry, make_functor, make_monotone

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

GRID_STEP_RANGE = (0.01, 0.25)

PROPERTIES = (
    "reduction",
    "monotonicity",
    "optimality",
    "hlp_agreement",
    "data_processing",
    "coincidence",
)


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config is missing {key!r}")
    return cfg[key]


def parse_payload(kind: str, data):
    """Decode one object payload according to its theory's object kind."""
    try:
        if kind == "dist":
            return Dist(np.asarray(data, dtype=float))
        if kind == "dist_pair":
            p, q = data
            return (Dist(np.asarray(p, dtype=float)), Dist(np.asarray(q, dtype=float)))
        if kind == "density":
            return DensityMatrix(complex_matrix_from_json(data))
        if kind == "density_pair":
            a, b = data
            return (
                DensityMatrix(complex_matrix_from_json(a)),
                DensityMatrix(complex_matrix_from_json(b)),
            )
        if kind == "pure":
            return BipartitePure.from_json(data)
    except (InvariantViolation, TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"bad {kind} object: {exc}") from exc
    raise ConfigError(f"unknown object kind {kind!r}")


def payload_to_json(payload):
    if hasattr(payload, "to_json"):
        return payload.to_json()
    if isinstance(payload, tuple):
        return [payload_to_json(part) for part in payload]
    return payload


def _validate_step(step: float) -> float:
    lo, hi = GRID_STEP_RANGE
    if not lo <= step <= hi:
        raise ConfigError(f"grid step {step} outside [{lo}, {hi}]")
    return float(step)


def build_candidates(cfg: dict, source_kind: str, target_payload) -> tuple[tuple, bool]:
    """Materialize the candidate payload list from its config spec.

    Returns (payloads, complete): ``complete`` is true only for the spectral
    family, which provably captures the unital classical boundary.
    """
    spec = _require(cfg, "candidates")
    kind = _require(spec, "kind")
    if kind == "explicit":
        payloads = tuple(
            parse_payload(source_kind, obj) for obj in _require(spec, "objects")
        )
        return payloads, False
    if kind == "grid":
        if source_kind != "dist":
            raise ConfigError("grid candidates need a distribution-valued source")
        step = _validate_step(float(_require(spec, "step")))
        length = int(_require(spec, "length"))
        return tuple(simplex_grid(length, step)), False
    if kind == "spectral":
        if not isinstance(target_payload, DensityMatrix):
            raise ConfigError("spectral candidates need a density-matrix target")
        if source_kind != "dist":
            raise ConfigError(
                "spectral candidates are distributions; the functor's source "
                "theory must be distribution-valued"
            )
        return (eig_hermitian(target_payload).eigenvalues,), True
    raise ConfigError(f"unknown candidate kind {kind!r}")


def cmd_reach(cfg: dict) -> tuple[int, dict]:
    registry = default_registry()
    theory_id = _require(cfg, "theory")
    entry = registry.entry(theory_id)
    source = ResourceRef(theory_id, parse_payload(entry.kind, _require(cfg, "source")))
    target = ResourceRef(theory_id, parse_payload(entry.kind, _require(cfg, "target")))
    decision = entry.oracle.decide(source, target)
    doc = {
        "command": "reach",
        "theory": theory_id,
        "reachable": decision.reachable,
        "exact": decision.exact,
    }
    if decision.witness is not None:
        doc["witness"] = payload_to_json(decision.witness)
    return EXIT_OK, doc


# object kind each monotone evaluates; guards config mismatches up front
_MONOTONE_KINDS = {
    "shannon": "dist",
    "kl": "dist_pair",
    "schmidt": "pure",
    "spectral_entropy": "density",
}


def cmd_extend(cfg: dict) -> tuple[int, dict]:
    registry = default_registry()
    theory_id = _require(cfg, "theory")
    entry = registry.entry(theory_id)
    functor = make_functor(_require(cfg, "functor"), theory_id)
    if functor.target_theory != theory_id:
        raise ConfigError(
            f"functor {functor.name!r} lands in {functor.target_theory!r}, "
            f"not {theory_id!r}"
        )
    source_kind = registry.entry(functor.source_theory).kind
    variance = _require(cfg, "variance")
    if variance not in (COVARIANT, CONTRAVARIANT):
        raise ConfigError(f"unknown variance {variance!r}")
    monotone_id = _require(cfg, "monotone")
    if _MONOTONE_KINDS.get(monotone_id) not in (None, source_kind):
        raise ConfigError(
            f"monotone {monotone_id!r} evaluates {_MONOTONE_KINDS[monotone_id]} "
            f"objects, but the functor's source theory holds {source_kind}"
        )
    monotone = make_monotone(monotone_id, variance)
    target_payload = parse_payload(entry.kind, _require(cfg, "target"))
    payloads, complete = build_candidates(cfg, source_kind, target_payload)
    problem = ExtensionProblem(
        monotone,
        functor,
        entry.oracle,
        tuple(ResourceRef(functor.source_theory, p) for p in payloads),
        candidates_complete=complete,
    )
    y = ResourceRef(theory_id, target_payload)
    doc = {
        "command": "extend",
        "theory": theory_id,
        "functor": functor.name,
        "monotone": monotone.name,
        "variance": variance,
        "candidates": len(problem.candidates),
        "minimal": minimal_extension(problem, y).to_json(),
        "maximal": maximal_extension(problem, y).to_json(),
    }
    return EXIT_OK, doc


def _shannon_embedding_problem(candidates: tuple[Dist, ...]) -> ExtensionProblem:
    registry = default_registry()
    return ExtensionProblem(
        make_monotone("shannon", COVARIANT),
        make_functor("classical_to_quantum"),
        registry.oracle("qrand_quniform"),
        tuple(ResourceRef(RAND_UNIFORM, p) for p in candidates),
        candidates_complete=False,
    )


def _verify_reduction(cfg: dict, rng: np.random.Generator) -> dict:
    samples = int(cfg.get("samples", 50))
    length = int(cfg.get("length", 3))
    dists = tuple(Dist(rng.dirichlet(np.ones(length))) for _ in range(samples))
    problem = _shannon_embedding_problem(dists)
    report = verify_reduction(problem, list(problem.candidates))
    return report.to_json()


def _verify_monotonicity(cfg: dict, rng: np.random.Generator) -> dict:
    samples = int(cfg.get("samples", 50))
    theory_id = cfg.get("theory", RAND_UNIFORM)
    registry = default_registry()
    if theory_id == RAND_UNIFORM:
        length = int(cfg.get("length", 3))
        step = _validate_step(float(cfg.get("step", 0.05)))
        problem = ExtensionProblem(
            make_monotone("shannon", COVARIANT),
            make_functor("identity", RAND_UNIFORM),
            registry.oracle(RAND_UNIFORM),
            tuple(ResourceRef(RAND_UNIFORM, p) for p in simplex_grid(length, step)),
        )
        pairs = []
        for _ in range(samples):
            p = Dist(rng.dirichlet(np.ones(length)))
            q = Dist(p.weights @ random_uniform_matrix(rng, length).entries)
            pairs.append(
                (ResourceRef(RAND_UNIFORM, p), ResourceRef(RAND_UNIFORM, q))
            )
    elif theory_id == "qrand_quniform":
        dim = int(cfg.get("length", 2))
        grid = simplex_grid(dim, _validate_step(float(cfg.get("step", 0.05))))
        problem = _shannon_embedding_problem(tuple(grid))
        pairs = []
        for _ in range(samples):
            rho = random_density(rng, dim)
            mixed = np.zeros((dim, dim), dtype=complex)
            for w in rng.dirichlet(np.ones(3)):
                u = random_unitary(rng, dim)
                mixed += w * u @ rho.entries @ u.conj().T
            sigma = DensityMatrix(mixed)
            pairs.append(
                (ResourceRef(theory_id, rho), ResourceRef(theory_id, sigma))
            )
    else:
        raise ConfigError(f"monotonicity check does not cover theory {theory_id!r}")
    report = verify_monotonicity(problem, pairs)
    return report.to_json()


def _verify_optimality(cfg: dict, rng: np.random.Generator) -> dict:
    samples = int(cfg.get("samples", 50))
    max_objects = int(cfg.get("max_objects", 6))
    violations = []
    for i in range(samples):
        problem, objects, grid = random_toy_problem(rng, max_objects=max_objects)
        report = verify_optimality_bruteforce(problem, objects, grid)
        if not report.passed:
            violations.append({"problem": i, "violations": list(report.violations)})
    return {"passed": not violations, "checked": samples, "violations": violations}


def _verify_hlp(cfg: dict, rng: np.random.Generator) -> dict:
    length = int(cfg.get("length", 3))
    step = _validate_step(float(cfg.get("step", 0.05)))
    grid = simplex_grid(length, step)
    disagreements = []
    for p in grid:
        for q in grid:
            lorenz_says = majorizes(p, q)
            lp_says = exists_uniform_map(p, q).feasible
            if lorenz_says != lp_says:
                disagreements.append(
                    {"p": p.to_json(), "q": q.to_json(), "lorenz": lorenz_says}
                )
    return {
        "passed": not disagreements,
        "checked": len(grid) ** 2,
        "violations": disagreements,
    }


def _verify_data_processing(cfg: dict, rng: np.random.Generator) -> dict:
    samples = int(cfg.get("samples", 200))
    length = int(cfg.get("length", 4))
    out_length = int(cfg.get("out_length", 3))
    violations = []
    for i in range(samples):
        p = Dist(rng.dirichlet(np.ones(length)))
        q = Dist(rng.dirichlet(np.ones(length)))
        m = random_stochastic(rng, length, out_length)
        p2 = Dist(p.weights @ m.entries)
        q2 = Dist(q.weights @ m.entries)
        if not exists_joint_stochastic_map((p, q), (p2, q2)).feasible:
            violations.append({"instance": i, "reason": "joint map not found"})
            continue
        before = kl_divergence(p, q)
        after = kl_divergence(p2, q2)
        if not ext_leq(after, before, 1e-9):
            violations.append(
                {"instance": i, "reason": "divergence increased",
                 "before": ext_to_json(before), "after": ext_to_json(after)}
            )
    return {"passed": not violations, "checked": samples, "violations": violations}


def _verify_coincidence(cfg: dict, rng: np.random.Generator) -> dict:
    samples = int(cfg.get("samples", 20))
    dims = cfg.get("dims", [2, 3, 4])
    bases = int(cfg.get("bases", 50))
    tol = 1e-6
    violations = []
    registry = default_registry()
    for i in range(samples):
        dim = int(dims[i % len(dims)])
        rho = random_density(rng, dim)
        spectrum = eig_hermitian(rho).eigenvalues
        problem = ExtensionProblem(
            make_monotone("shannon", COVARIANT),
            make_functor("classical_to_quantum"),
            registry.oracle("qrand_quniform"),
            (ResourceRef(RAND_UNIFORM, spectrum),),
            candidates_complete=True,
        )
        y = ResourceRef("qrand_quniform", rho)
        reference = spectral_entropy(rho)
        lo = minimal_extension(problem, y).value
        hi = maximal_extension(problem, y).value
        sampled = measurement_entropy_search(rho, bases, int(cfg.get("seed", 0)) + i)
        if abs(lo - reference) > tol or abs(hi - reference) > tol:
            violations.append({"instance": i, "minimal": lo, "maximal": hi,
                               "reference": reference})
        elif sampled < reference - 1e-9:
            violations.append({"instance": i, "reason": "sampled search beat spectrum",
                               "sampled": sampled, "reference": reference})
    return {"passed": not violations, "checked": samples, "violations": violations}


_VERIFIERS = {
    "reduction": _verify_reduction,
    "monotonicity": _verify_monotonicity,
    "optimality": _verify_optimality,
    "hlp_agreement": _verify_hlp,
    "data_processing": _verify_data_processing,
    "coincidence": _verify_coincidence,
}


def cmd_verify(cfg: dict) -> tuple[int, dict]:
    prop = _require(cfg, "property")
    if prop not in PROPERTIES:
        raise ConfigError(f"unknown property {prop!r}; known: {', '.join(PROPERTIES)}")
    rng = np.random.default_rng(int(cfg.get("seed", 0)))
    result = _VERIFIERS[prop](cfg, rng)
    doc = {
        "command": "verify",
        "property": prop,
        "passed": bool(result["passed"]),
        "checked": int(result.get("checked", 0)),
        "violations": result.get("violations", []),
    }
    extras = {
        k: v for k, v in result.items() if k not in ("passed", "checked", "violations")
    }
    if extras:
        doc["details"] = extras
    return (EXIT_OK if doc["passed"] else EXIT_VIOLATION), doc


def cmd_lorenz(cfg: dict) -> tuple[int, dict]:
    raw = _require(cfg, "distributions")
    if not 1 <= len(raw) <= 2:
        raise ConfigError("lorenz takes one or two distributions")
    out = cfg.get("out")
    if not out:
        raise ConfigError("lorenz needs an output path")
    dists = [Dist(np.asarray(d, dtype=float)) for d in raw]
    curves = [lorenz_curve(d) for d in dists]
    if len(curves) == 1:
        content = curves[0].to_csv()
        doc = {"command": "lorenz", "out": out, "curves": 1}
    else:
        dominated = majorizes(dists[0], dists[1])
        blocks = [
            "# curve: p\n" + curves[0].to_csv(),
            "# curve: q\n" + curves[1].to_csv(),
            f"# q_majorized_by_p: {json.dumps(dominated)}\n",
        ]
        content = "".join(blocks)
        doc = {"command": "lorenz", "out": out, "curves": 2,
               "q_majorized_by_p": dominated}
    with open(out, "w") as fh:
        fh.write(content)
    return EXIT_OK, doc


_COMMANDS = {
    "reach": cmd_reach,
    "extend": cmd_extend,
    "verify": cmd_verify,
    "lorenz": cmd_lorenz,
}


def run(cfg: dict) -> tuple[int, dict]:
    command = _require(cfg, "command")
    if command not in _COMMANDS:
        raise ConfigError(
            f"unknown command {command!r}; known: {', '.join(sorted(_COMMANDS))}"
        )
    return _COMMANDS[command](cfg)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="kanext",
        description="Reachability, monotone extensions, and property checks "
        "for resource theories, driven by a JSON config.",
    )
    parser.add_argument("--config", required=True,
                        help="path to the JSON config, or - for stdin")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--out", default=None,
                        help="override the config output path")
    args = parser.parse_args(argv)

    try:
        if args.config == "-":
            cfg = json.load(sys.stdin)
        else:
            with open(args.config) as fh:
                cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.out is not None:
            cfg["out"] = args.out
        if int(cfg.get("seed", 0)) < 0:
            raise ConfigError("seed must be nonnegative")
        code, doc = run(cfg)
    except (ConfigError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps(doc, indent=2, sort_keys=True, default=_json_default))
    return code


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


if __name__ == "__main__":
    sys.exit(main())
