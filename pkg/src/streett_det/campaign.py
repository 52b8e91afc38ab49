"""Differential campaigns and bound reports.

A campaign generates seeded NSAs over a parameter grid, determinizes each
with the selected backends, and compares every backend against the lasso
oracle on an exhaustive lasso set.  The report is JSON lines: one record
per instance in instance order, then one summary record.  Field order is
fixed so reports diff cleanly; nothing time- or host-dependent is written.
"""
from __future__ import annotations

import itertools
import json
from pathlib import Path
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from math import comb, factorial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .determinize import BUILDERS, DEFAULT_STATE_CAP
from .errors import CapacityError, DomainError
from .formats import parse_automaton
from .generators import GenSpec, enumerate_lassos, random_nsa, to_state_based
from .lasso import det_accepts, nsa_accepts
from .omega import DPTA, DRA, DRTA, Lasso, StreettNSA
from .trees import CORRECTED, VARIANTS

PASSED = "PASSED"
FAILED = "FAILED"
CAPACITY = "CAPACITY"


# ---------------------------------------------------------------------------
# bound formulas, exact integers


def drta_bound(n: int, k: int) -> int:
    """Non-sink H-Safra states: n^(5n) (n!)^n."""
    return n ** (5 * n) * factorial(n) ** n


def drta_bound_small_k(n: int, k: int) -> Optional[int]:
    """The sharper n^(5n) k^(nk), stated for k <= n."""
    return n ** (5 * n) * k ** (n * k) if k <= n else None


def dpta_bound(n: int, k: int) -> int:
    """Non-sink LIR-H-Safra states: 3 (n(mu+1)-1)! n! X."""
    mu = min(n, k)
    x = factorial(n) ** n if k >= n else k ** (n * k)
    return 3 * factorial(n * (mu + 1) - 1) * factorial(n) * x


def dra_bound(n: int, k: int) -> int:
    """Non-sink mu-Safra states, the coarse count: n^(7n) (n!)^(n+1)."""
    return n ** (7 * n) * factorial(n) ** (n + 1)


def dra_bound_refined(n: int, k: int) -> int:
    """Non-sink mu-Safra states, the refined count: n^(5n) (n!)^(n+1)."""
    return n ** (5 * n) * factorial(n) ** (n + 1)


def name_bound(n: int, k: int) -> int:
    """Distinct H-Safra node names: C(n+mu, n) n^n (mu!)^n."""
    mu = min(n, k)
    return comb(n + mu, n) * n ** n * factorial(mu) ** n


def tree_size_bound(n: int, k: int) -> int:
    return n * (min(n, k) + 1)


def priority_range(n: int, k: int) -> Tuple[int, int]:
    return 2, 2 * n * (min(n, k) + 1) + 1


@dataclass(frozen=True)
class BoundRow:
    quantity: str
    observed: int
    bound: int
    relation: str = "<="

    @property
    def ok(self) -> bool:
        return self.observed <= self.bound if self.relation == "<=" else self.observed >= self.bound


def effective_pairs(aut) -> int:
    """Rabin pairs that can accept; a pair with an empty accepting set is
    vacuous (its name only ever appears as rejected)."""
    return sum(1 for acc, _ in aut.rabin_pairs.values() if acc)


def bounds_report(nsa: StreettNSA, results: Dict[str, object]) -> List[BoundRow]:
    """Observed values of the built automata against the closed-form bounds.

    ``results`` maps backend kind to a built automaton; missing kinds are
    skipped.  State counts exclude the sink; tree sizes exclude a guarding
    root (see the determinizer's ``max_tree_nodes`` statistic); Rabin names
    count non-vacuous pairs; the DRA rows count distinct trees, since the
    E/F markers split one tree into several states.
    """
    n, k = nsa.n, nsa.k
    rows = []
    drta = results.get(DRTA)
    if drta is not None:
        rows.append(BoundRow("drta_states", drta.num_live_states, drta_bound(n, k)))
        small = drta_bound_small_k(n, k)
        if small is not None:
            rows.append(BoundRow("drta_states_small_k", drta.num_live_states, small))
        rows.append(BoundRow("rabin_names", effective_pairs(drta), name_bound(n, k)))
    dpta = results.get(DPTA)
    if dpta is not None:
        rows.append(BoundRow("dpta_states", dpta.num_live_states, dpta_bound(n, k)))
        used = [p for row in dpta.labels for p in row]
        low, high = priority_range(n, k)
        rows.append(BoundRow("priority_min", min(used), low, ">="))
        rows.append(BoundRow("priority_max", max(used), high))
    dra = results.get(DRA)
    if dra is not None:
        trees = dra.stats.get("live_trees", dra.num_live_states)
        rows.append(BoundRow("dra_trees", trees, dra_bound(n, k)))
        rows.append(BoundRow("dra_trees_refined", trees, dra_bound_refined(n, k)))
    for kind in (DRTA, DPTA, DRA):
        aut = results.get(kind)
        if aut is not None and "max_tree_nodes" in aut.stats:
            rows.append(BoundRow(f"{kind}_tree_nodes", aut.stats["max_tree_nodes"], tree_size_bound(n, k)))
    return rows


def format_bounds(rows: Sequence[BoundRow]) -> str:
    header = ("quantity", "observed", "relation", "bound", "ok")
    body = [(r.quantity, str(r.observed), r.relation, str(r.bound), "yes" if r.ok else "NO") for r in rows]
    widths = [max(len(line[i]) for line in [header] + body) for i in range(len(header))]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip() for line in [header] + body
    ) + "\n"


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class CampaignConfig:
    n: Tuple[int, ...] = (1, 2, 3, 4)
    k: Tuple[int, ...] = (1, 2, 3)
    sigma: Tuple[int, ...] = (2,)
    density: Tuple[float, ...] = (0.3, 0.6, 1.0)
    pair_density: float = 0.3
    instances: int = 36
    max_prefix: int = 2
    max_cycle: int = 3
    backends: Tuple[str, ...] = (DRTA, DPTA, DRA)
    dra_max_n: Optional[int] = None
    seed: int = 0
    jobs: int = 1
    cap: int = DEFAULT_STATE_CAP
    variant: str = CORRECTED
    output: Optional[str] = None
    corpus: Tuple[str, ...] = ()

    def __post_init__(self):
        if isinstance(self.corpus, (list, str)):
            object.__setattr__(self, "corpus", tuple(self.corpus) if isinstance(self.corpus, list) else (self.corpus,))
        if self.corpus:
            object.__setattr__(self, "instances", len(self.corpus))
        for name in ("n", "k", "sigma", "density", "backends"):
            value = getattr(self, name)
            if isinstance(value, (list, int, float, str)):
                object.__setattr__(self, name, tuple(value) if isinstance(value, list) else (value,))
            if not getattr(self, name):
                raise DomainError(f"campaign field {name!r} must be nonempty")
        unknown = set(self.backends) - set(BUILDERS)
        if unknown:
            raise DomainError(f"unknown backends {sorted(unknown)}")
        if self.instances < 1 or self.max_prefix < 0 or self.max_cycle < 1 or self.jobs < 1:
            raise DomainError("need instances >= 1, max_prefix >= 0, max_cycle >= 1, jobs >= 1")
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown variant {self.variant!r}")
        for n, k, sigma, density in self.grid():
            GenSpec(n, k, sigma, density, self.pair_density, 0)

    def grid(self):
        return list(itertools.product(self.n, self.k, self.sigma, self.density))

    def spec(self, index: int) -> GenSpec:
        grid = self.grid()
        n, k, sigma, density = grid[index % len(grid)]
        return GenSpec(n, k, sigma, density, self.pair_density, self.seed + index)

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise DomainError(f"unknown campaign fields {sorted(extra)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "CampaignConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise DomainError("config must be a JSON object")
        return cls.from_dict(data)


# ---------------------------------------------------------------------------
# running


Member = Callable[[object, Lasso], bool]


def _lasso_json(w: Lasso) -> dict:
    return {"prefix": list(w.prefix), "cycle": list(w.cycle)}


def run_instance(cfg: CampaignConfig, index: int, builders=None, member: Member = det_accepts,
                 lassos: Optional[List[Lasso]] = None) -> dict:
    """One campaign record; a pure function of its arguments."""
    builders = builders or BUILDERS
    if cfg.corpus:
        nsa = to_state_based(parse_automaton(Path(cfg.corpus[index]).read_text(encoding="utf-8")))
        source = {"file": cfg.corpus[index], "n": nsa.n, "k": nsa.k, "sigma": nsa.alphabet.size}
    else:
        spec = cfg.spec(index)
        nsa = random_nsa(spec)
        source = asdict(spec)
    record = {
        "index": index,
        "spec": source,
        "mu": nsa.mu,
        "status": PASSED,
        "backends": {},
        "bounds": [],
        "lassos": 0,
        "comparisons": 0,
        "agreements": 0,
        "invariant_violations": 0,
        "bound_violations": 0,
        "counterexample": None,
        "error": None,
    }
    kinds = [x for x in cfg.backends if x != DRA or cfg.dra_max_n is None or nsa.n <= cfg.dra_max_n]
    built = {}
    try:
        for kind in kinds:
            built[kind] = builders[kind](nsa, cap=cfg.cap, check=False, variant=cfg.variant)
    except CapacityError as exc:
        record["status"] = CAPACITY
        record["error"] = str(exc)
        return record
    for kind, aut in built.items():
        entry = {"states": aut.num_states, "live_states": aut.num_live_states}
        if kind == DPTA:
            entry["priorities"] = len({p for row in aut.labels for p in row})
        else:
            entry["pairs"] = len(aut.rabin_pairs)
        entry["max_tree_nodes"] = aut.stats.get("max_tree_nodes")
        entry["max_tree_nodes_raw"] = aut.stats.get("max_tree_nodes_raw")
        entry["invariant_violations"] = aut.stats.get("invariant_violations", 0)
        record["invariant_violations"] += entry["invariant_violations"]
        record["backends"][kind] = entry
    rows = bounds_report(nsa, built)
    record["bounds"] = [[r.quantity, r.observed, r.relation, r.bound, r.ok] for r in rows]
    record["bound_violations"] = sum(not r.ok for r in rows)
    words = lassos if lassos is not None else enumerate_lassos(nsa.alphabet.size, cfg.max_prefix, cfg.max_cycle)
    for w in words:
        record["lassos"] += 1
        expected = nsa_accepts(nsa, w)
        verdicts = {}
        for kind, aut in built.items():
            got = member(aut, w)
            verdicts[kind] = got
            record["comparisons"] += 1
            record["agreements"] += got == expected
        if record["counterexample"] is None and any(v != expected for v in verdicts.values()):
            record["counterexample"] = {**_lasso_json(w), "nsa": expected, "backends": verdicts}
    if record["counterexample"] or record["invariant_violations"] or record["bound_violations"]:
        record["status"] = FAILED
    return record


def _run_one(args):
    cfg, index = args
    return run_instance(cfg, index)


def run_campaign(cfg: CampaignConfig, builders=None, member: Member = det_accepts) -> List[dict]:
    """Every instance record in order, followed by a summary record.

    With ``jobs > 1`` instances run in worker processes; custom ``builders``
    or ``member`` functions force a sequential run.
    """
    indices = range(cfg.instances)
    if cfg.jobs > 1 and builders is None and member is det_accepts:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(_run_one, [(cfg, i) for i in indices]))
    else:
        records = [run_instance(cfg, i, builders, member) for i in indices]
    return records + [summarize(records)]


def summarize(records: Sequence[dict]) -> dict:
    failed = [r["index"] for r in records if r["status"] == FAILED]
    capped = [r["index"] for r in records if r["status"] == CAPACITY]
    first = next((r for r in records if r["counterexample"]), None)
    return {
        "summary": {
            "status": FAILED if failed else PASSED,
            "instances": len(records),
            "passed": sum(r["status"] == PASSED for r in records),
            "failed": failed,
            "capacity": capped,
            "lassos": sum(r["lassos"] for r in records),
            "comparisons": sum(r["comparisons"] for r in records),
            "agreements": sum(r["agreements"] for r in records),
            "invariant_violations": sum(r["invariant_violations"] for r in records),
            "bound_violations": sum(r["bound_violations"] for r in records),
            "first_counterexample": None if first is None else {"index": first["index"], **first["counterexample"]},
        }
    }


def report_text(records: Sequence[dict]) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)
