"""End-to-end simplification: simulate, verify candidates, rebuild.

Candidates are verified one hidden layer at a time, in ascending order;
all queries of a layer finish before the next layer is dispatched.  Every
query is cut from the *original* network, so verdicts never depend on
which other queries have already finished, and the verdict table is
ordered by (layer, index) whatever the completion order.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .errors import InputUnreadable, InvalidConfig, NNetError
from .network import Network, from_document, to_document
from .nnet_io import parse_nnet, write_nnet
from .simplifier import check_equivalence, simplify
from .simulation import SimulationConfig, filter_candidates
from .verifier import ALIVE, DEAD, UNKNOWN, Budgets, Epsilon, Strict, make_query, verify

__all__ = ["PipelineConfig", "SimplificationReport", "PipelineResult", "run", "run_network", "emit_report"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    input_path: str | None = None
    output_path: str | None = None
    report_path: str | None = None
    simulations: int = 20000
    seed: int = 0
    mode: str = "strict"
    epsilon: float = 0.01
    timeout: float | None = 60.0
    budget: int = 10**6
    workers: int | None = None
    allow_approximate: bool = False
    equivalence_samples: int = 10_000

    def validate(self):
        if self.simulations < 0:
            raise InvalidConfig("simulations must be >= 0")
        if self.mode not in ("strict", "epsilon"):
            raise InvalidConfig(f"unknown mode {self.mode!r}")
        if not self.epsilon > 0:
            raise InvalidConfig("epsilon must be > 0")
        if self.budget < 1:
            raise InvalidConfig("region budget must be >= 1")
        if self.timeout is not None and self.timeout < 0:
            raise InvalidConfig("timeout must be >= 0")
        if self.workers is not None and self.workers < 1:
            raise InvalidConfig("workers must be >= 1")
        if self.equivalence_samples < 0:
            raise InvalidConfig("equivalence_samples must be >= 0")
        if self.mode == "epsilon" and not self.allow_approximate:
            raise InvalidConfig(
                "epsilon mode only proves nodes stay below epsilon, so removing them is "
                "approximate; pass allow_approximate (--allow-approximate) to accept that"
            )

    @property
    def verifier_mode(self):
        return Strict() if self.mode == "strict" else Epsilon(self.epsilon)

    @property
    def budgets(self):
        return Budgets(self.budget, self.timeout or None)

    @property
    def worker_count(self):
        return self.workers or os.cpu_count() or 1


@dataclass
class SimplificationReport:
    verdicts: list
    totals: dict
    result_kind: str
    constant_output: list | None
    cascade_removed: list
    equivalence: dict
    config: dict
    tool_version: str = __version__

    def to_dict(self, timings=True) -> dict:
        data = asdict(self)
        if not timings:
            for row in data["verdicts"]:
                row.pop("wall_time", None)
        return data


@dataclass
class PipelineResult:
    network: Network
    plan: object
    report: SimplificationReport
    verdicts: dict = field(default_factory=dict)


def _dispatch(queries, verifier, pool):
    if pool is None:
        return [verifier(q) for q in queries]
    return list(pool.map(verifier, queries))


def verify_candidates(net, candidates, mode, budgets, workers=1, verifier=verify):
    """Verdicts for ``candidates`` (NodeIds), layer by layer; returns dict NodeId -> Verdict."""
    by_layer = {}
    for node in sorted(candidates):
        by_layer.setdefault(node.layer, []).append(node)
    verdicts = {}
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 and len(candidates) > 1 else None
    try:
        for layer in sorted(by_layer):
            nodes = by_layer[layer]
            queries = [make_query(net, node, mode, budgets) for node in nodes]
            for node, verdict in zip(nodes, _dispatch(queries, verifier, pool)):
                verdicts[node] = verdict
                log.info(
                    "%s %s regions=%d time=%.3fs%s",
                    node,
                    verdict.kind,
                    verdict.regions,
                    verdict.wall_time,
                    f" ({verdict.reason})" if verdict.reason else "",
                )
    finally:
        if pool is not None:
            pool.shutdown()
    return verdicts


def _config_echo(config: PipelineConfig) -> dict:
    echo = asdict(config)
    echo["workers"] = config.worker_count
    echo["layer_order"] = "ascending"
    return echo


def run_network(net: Network, config: PipelineConfig = PipelineConfig(), verifier=verify) -> PipelineResult:
    """All three stages on an in-memory network."""
    config.validate()
    candidates = filter_candidates(net, SimulationConfig(config.simulations, config.seed))
    verdicts = verify_candidates(
        net, candidates.members, config.verifier_mode, config.budgets, config.worker_count, verifier
    )
    dead = {node: v.kind for node, v in verdicts.items() if v.kind == DEAD}
    simplified, plan = simplify(net, dead)
    target = plan.constant_output if plan.result_kind == "constant" else simplified
    equivalence = check_equivalence(net, target, config.equivalence_samples, config.seed)

    counts = {kind: sum(v.kind == kind for v in verdicts.values()) for kind in (DEAD, ALIVE, UNKNOWN)}
    fired = {}
    for v in verdicts.values():
        if v.kind == UNKNOWN:
            fired[v.reason] = fired.get(v.reason, 0) + 1
    original_hidden = net.hidden_count
    removed = plan.removed_count
    totals = {
        "candidates": len(candidates),
        "queries": len(verdicts),
        "dead": counts[DEAD],
        "alive": counts[ALIVE],
        "unknown": counts[UNKNOWN],
        "unknown_by_reason": fired,
        "cascade_removed": len(plan.cascade_removed),
        "removed": removed,
        "original_hidden": original_hidden,
        "simplified_hidden": original_hidden - removed,
        "reduction_percent": 100.0 * removed / original_hidden if original_hidden else 0.0,
        "simulations": candidates.samples_used,
    }
    rows = [
        {
            "node": str(node),
            "layer": node.layer,
            "index": node.index,
            "verdict": v.kind,
            "reason": v.reason,
            "regions": v.regions,
            "wall_time": round(v.wall_time, 6),
            "witness": None if v.witness is None else [repr(float(x)) for x in v.witness],
        }
        for node, v in sorted(verdicts.items())
    ]
    report = SimplificationReport(
        verdicts=rows,
        totals=totals,
        result_kind=plan.result_kind,
        constant_output=None
        if plan.constant_output is None
        else [repr(float(x)) for x in plan.constant_output],
        cascade_removed=[{"node": str(n), "reason": r} for n, r in plan.cascade_removed],
        equivalence={
            "samples": equivalence.samples,
            "seed": config.seed,
            "max_deviation": repr(equivalence.max_deviation),
            "per_output": [repr(float(x)) for x in equivalence.per_output],
            "worst_input": [repr(float(x)) for x in equivalence.worst_input],
        },
        config=_config_echo(config),
    )
    return PipelineResult(simplified, plan, report, verdicts)


def emit_report(report: SimplificationReport, timings=True) -> str:
    """Canonical JSON: sorted keys, exact decimal strings for bit-sensitive numbers."""
    return json.dumps(report.to_dict(timings), sort_keys=True, indent=2) + "\n"


def run(config: PipelineConfig, timings=True, verifier=verify) -> SimplificationReport:
    """Read ``config.input_path``, simplify, write the network and report files."""
    config.validate()
    try:
        text = Path(config.input_path).read_text()
        doc = parse_nnet(text)
    except (OSError, TypeError) as exc:
        raise InputUnreadable(f"cannot read {config.input_path}: {exc}") from exc
    except NNetError as exc:
        raise InputUnreadable(f"{config.input_path} is not a valid NNet file: {exc}") from exc
    net = from_document(doc)
    result = run_network(net, config, verifier)
    if config.output_path:
        comments = list(doc.header_comments)
        comments.append(
            f"// simplified by nnsimplify {__version__}: "
            f"{result.report.totals['removed']} of {net.hidden_count} hidden neurons removed"
        )
        out = to_document(result.network, header_comments=comments, flag_line=doc.flag_line)
        Path(config.output_path).write_text(write_nnet(out), newline="\n")
    if config.report_path:
        Path(config.report_path).write_text(emit_report(result.report, timings), newline="\n")
    return result.report


def strict_deviation_alarm(report: SimplificationReport) -> bool:
    return report.config["mode"] == "strict" and float(report.equivalence["max_deviation"]) > 0.0
