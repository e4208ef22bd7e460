"""Config-driven experiment runs: generate targets, build the hitter and inner
sampler, sample, and verify every gate.

All randomness derives from the config's ``seed`` through named sub-streams
(``graph``, ``hitter``, ``inner``, ``corpus``), so components can be varied
independently.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional

from . import checks
from .bp import BranchingProgram, accept_prob_exact, read_program
from .graphs import (
    LabelledDigraph,
    cycle_graph,
    graph_to_bp,
    random_consistent_graph,
    read_graph,
    walk_prob_matrix,
)
from .hitprog import build_hit_program, hit_approx_error, restriction_masks, verify_hitter_on_restrictions
from .oracle import OracleSession, PlanViolation
from .reduction import build_schedule, run_reduction
from .report import ExperimentReport, display, rational
from .samplers import (
    QuerySet,
    averaging_sampler,
    hitter_from_masks,
    random_query_set,
    read_query_set,
    verify_sampler,
)


class ConfigError(ValueError):
    pass


def substream(seed: int, name: str, index: int = 0) -> int:
    digest = hashlib.sha256(f"{seed}:{name}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def parse_rational(value, what: str) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{what} must be a rational like '1/4', got {value!r}") from exc


def bundled_scenarios() -> list[str]:
    root = resources.files("pbpsamp") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_config(source) -> dict:
    """A config path, a bundled scenario name, or an already-parsed dict."""
    if isinstance(source, dict):
        return dict(source)
    path = Path(source)
    if path.exists():
        cfg = json.loads(path.read_text())
        cfg.setdefault("_base_dir", str(path.resolve().parent))
        return cfg
    name = str(source)
    res = resources.files("pbpsamp") / "scenarios" / f"{name}.json"
    if res.is_file():
        return json.loads(res.read_text())
    raise ConfigError(f"no config file or bundled scenario named {name!r}")


def _resolve(cfg: dict, p: str) -> Path:
    path = Path(p)
    if not path.is_absolute() and "_base_dir" in cfg:
        path = Path(cfg["_base_dir"]) / path
    return path


# -- validation ----------------------------------------------------------------


@dataclass
class Target:
    name: str
    program: BranchingProgram
    graph: Optional[LabelledDigraph] = None
    u: int = 0
    v: int = 0


def validate(cfg: dict) -> dict:
    kind = cfg.get("kind", "reduction")
    if kind not in ("reduction", "lemma-suite"):
        raise ConfigError(f"unknown scenario kind {kind!r}")
    if not isinstance(cfg.get("seed", 0), int):
        raise ConfigError("seed must be an integer")
    if kind == "lemma-suite":
        return cfg
    eps = parse_rational(cfg.get("epsilon"), "epsilon")
    if not 0 < eps < 1:
        raise ConfigError(f"epsilon must lie in (0, 1), got {eps}")
    c = parse_rational(cfg.get("c", "1"), "c")
    if c <= 0:
        raise ConfigError("c must be positive")
    a = cfg.get("a", 1)
    if not isinstance(a, int) or a < 1:
        raise ConfigError("a must be a positive integer")
    if ("target" in cfg) == ("corpus" in cfg):
        raise ConfigError("give exactly one of 'target' or 'corpus'")
    if "target" in cfg and not isinstance(cfg.get("n"), int):
        raise ConfigError("a single-target run needs an integer n")
    for key in ("inner", "hitter"):
        block = cfg.get(key, {"kind": "full"})
        if block.get("kind") not in {"inner": ("full", "random", "plan"), "hitter": ("full", "random", "greedy", "file")}[key]:
            raise ConfigError(f"unknown {key} kind {block.get('kind')!r}")
    return cfg


def _graph_from(cfg: dict, spec, seed: int) -> LabelledDigraph:
    if isinstance(spec, str):
        return read_graph(_resolve(cfg, spec))
    kind = spec.get("kind")
    if kind == "cycle":
        return cycle_graph(spec["vertices"])
    if kind == "random":
        return random_consistent_graph(spec["vertices"], spec.get("d", 2), substream(seed, "graph"))
    if "perm" in spec:
        return LabelledDigraph.from_dict(spec)
    raise ConfigError(f"cannot build a graph from {spec!r}")


def build_targets(cfg: dict) -> list[Target]:
    seed = cfg.get("seed", 0)
    if "target" in cfg:
        t = cfg["target"]
        n = cfg["n"]
        if "bp" in t:
            B = read_program(_resolve(cfg, t["bp"]))
            if B.n != n:
                raise ConfigError(f"program length {B.n} does not match n = {n}")
            return [Target(str(t["bp"]), B)]
        G = _graph_from(cfg, t["graph"], seed)
        u, v = t.get("u", 0), t.get("v", 0)
        return [Target(f"graph|V|={G.vertices} u={u} v={v}", graph_to_bp(G, u, v, n), G, u, v)]
    corpus = cfg["corpus"]
    lo, hi = corpus.get("vertices", [16, 256])
    n_lo, n_hi = corpus.get("n", [4, 8])
    out = []
    for k in range(corpus.get("count", 50)):
        rng = random.Random(substream(seed, "corpus", k))
        V = rng.randint(lo, hi)
        n = rng.randint(n_lo, n_hi)
        G = random_consistent_graph(V, 2, substream(seed, "graph", k))
        u = rng.randrange(V)
        v = u
        if corpus.get("reachable_target", True):
            # end the walk of a random string so that the exact value is nonzero
            for _ in range(n):
                v = G.perm[rng.randrange(G.d)][v]
        else:
            v = rng.randrange(V)
        out.append(Target(f"corpus[{k}] |V|={V} u={u} v={v}", graph_to_bp(G, u, v, n), G, u, v))
    return out


# -- components ------------------------------------------------------------------


def build_hitter(cfg: dict, group: list[Target], n: int, d: int, delta: Fraction) -> QuerySet:
    block = cfg.get("hitter", {"kind": "full"})
    seed = cfg.get("seed", 0)
    kind = block["kind"]
    if kind == "full":
        return QuerySet.full_cube(n, d)
    if kind == "random":
        return random_query_set(n, d, block["size"], substream(seed, "hitter", n))
    if kind == "file":
        return read_query_set(_resolve(cfg, block["path"]), n, d)
    masks = [m for t in group for _, m in restriction_masks(t.program, delta)]
    return hitter_from_masks(masks, n, d).hitter


def build_inner(cfg: dict, n: int, d: int, eps_inner: Fraction, w_inner: int, bh_programs: list):
    block = cfg.get("inner", {"kind": "full"})
    seed = cfg.get("seed", 0)
    kind = block["kind"]
    if kind == "full":
        return averaging_sampler(QuerySet.full_cube(n, d), 0, w_inner)
    if kind == "plan":
        return averaging_sampler(read_query_set(_resolve(cfg, block["path"]), n, d), eps_inner, w_inner)
    size = block["size"]
    tries = block.get("search_seeds", 1)
    Q = None
    for k in range(tries):
        Q = random_query_set(n, d, size, substream(seed, "inner", n * 10_000 + k))
        if verify_sampler(Q, bh_programs, eps_inner):
            break
    return averaging_sampler(Q, eps_inner, w_inner)


# -- runs --------------------------------------------------------------------------


def _echo(cfg: dict) -> dict:
    return {k: v for k, v in cfg.items() if not k.startswith("_")}


def run_lemma_suite(cfg: dict) -> ExperimentReport:
    seed = cfg.get("seed", 0)
    results = []
    results += checks.oracle_equivalence(cfg.get("trials", 60), 16, 6, 8, 2, substream(seed, "corpus", 1))
    results.append(checks.injectivity_exhaustive(cfg.get("injectivity_n", 3), 3))
    results.append(checks.injectivity_random(20, 10, 6, substream(seed, "corpus", 2)))
    results += checks.approximation_law(seed=substream(seed, "corpus", 3), corpus_per_family=60)
    size = checks.size_law(sizes=(4, 16, 64), seeds=20)
    from .family import FamilySpec

    fam = FamilySpec(4, 2, 2, True, "all", "all")
    samplers = [averaging_sampler(q) for q in size["passing"].values()]
    results.append(checks.sampler_implies_hitter(samplers, fam, Fraction(1, 4)))
    battery = [averaging_sampler(random_query_set(n, 2, k, substream(seed, "inner", 100 * n + k))) for n in (4, 6, 8) for k in (3, 9, 27)]
    results.append(checks.sampler_adversary_consistency(battery, Fraction(1, 8)))
    results.append(checks.adversary_completeness(200, 12, substream(seed, "corpus", 4)))
    results += checks.prefix_adversaries(100, 6, substream(seed, "corpus", 5))
    results.append(checks.exactness(20, 12, substream(seed, "corpus", 6)))
    rows = [dict(index=i, **r.row()) for i, r in enumerate(results)]
    agg = {"passed": all(r.passed for r in results), "checks": len(results)}
    return ExperimentReport(_echo(cfg), "lemma-suite/v1", rows, [], agg)


def run_scenario(source) -> ExperimentReport:
    cfg = validate(load_config(source))
    if cfg.get("kind", "reduction") == "lemma-suite":
        return run_lemma_suite(cfg)
    eps = parse_rational(cfg["epsilon"], "epsilon")
    c = parse_rational(cfg.get("c", "1"), "c")
    a = cfg.get("a", 1)
    targets = build_targets(cfg)
    groups: dict[int, list[tuple[int, Target]]] = {}
    for idx, t in enumerate(targets):
        if t.program.a > a:
            raise ConfigError(f"target {t.name} has more than a = {a} accept states")
        groups.setdefault(t.program.n, []).append((idx, t))

    rows: dict[int, dict] = {}
    schedules = []
    for n in sorted(groups):
        group = groups[n]
        d = group[0][1].program.d
        sched = build_schedule(n, a, eps, c)
        H = build_hitter(cfg, [t for _, t in group], n, d, sched.delta_hit)
        sched = sched.with_hitter(len(H))
        hps = {idx: build_hit_program(t.program, H) for idx, t in group}
        inner = build_inner(cfg, n, d, sched.eps_inner, sched.w_inner, [hp.explicit_bp for hp in hps.values()])
        sched_row = sched.to_dict()
        sched_row["inner_size"] = len(inner.plan)
        sched_row["hitter_digest"] = H.digest()
        schedules.append(sched_row)
        for idx, t in group:
            B, hp = t.program, hps[idx]
            exact = accept_prob_exact(B).value
            gate_oracle = t.graph is None or walk_prob_matrix(t.graph, t.u, t.v, n) == exact
            gate_hitter = bool(verify_hitter_on_restrictions(H, B, sched.delta_hit))
            gate_inner = bool(verify_sampler(inner, [hp.explicit_bp], sched.eps_inner))
            approx = hit_approx_error(B, H, hp)
            session = OracleSession(B)
            try:
                res = run_reduction(session, H, inner)
                gate_plan = True
            except PlanViolation:
                res, gate_plan = None, False
            est = res.estimate if res else Fraction(0)
            err = abs(est - exact)
            rows[idx] = {
                "index": idx,
                "target": t.name,
                "n": n,
                "vertices": B.widths[0],
                "exact": rational(exact),
                "estimate": rational(est),
                "error": rational(err),
                "error_display": display(err),
                "b_queries": res.b_queries if res else 0,
                "accounting_bound": res.accounting_bound if res else 0,
                "hitter_size": len(H),
                "inner_size": len(inner.plan),
                "w_inner": sched.w_inner,
                "bh_width": hp.width,
                "approx_error": rational(approx),
                "gate_oracle": gate_oracle,
                "gate_hitter": gate_hitter,
                "gate_inner": gate_inner,
                "gate_width": hp.width_law_holds(),
                "gate_approx": approx <= sched.delta_budget,
                "gate_error": res is not None and err <= eps,
                "gate_queries": res is not None and res.b_queries <= res.accounting_bound,
                "gate_plan": gate_plan,
            }
    ordered = [rows[i] for i in sorted(rows)]
    gates = [k for k in ordered[0] if k.startswith("gate_")] if ordered else []
    max_err = max((Fraction(r["error"]) for r in ordered), default=Fraction(0))
    agg = {
        "instances": len(ordered),
        "max_error": rational(max_err),
        "max_error_display": display(max_err),
        "epsilon": rational(eps),
        "gate_failures": {g: sum(not r[g] for r in ordered) for g in gates},
    }
    agg["passed"] = bool(ordered) and all(v == 0 for v in agg["gate_failures"].values())
    return ExperimentReport(_echo(cfg), "reduction/v1", ordered, schedules, agg)
