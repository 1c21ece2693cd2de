"""Command-line interface: ``hgrecolor <command> [options]``.

JSON is the canonical output (sorted keys, two-space indent); sweeps and
tables can also be written as CSV. Exit status is 0 on success, 1 on a
domain failure (improper coloring, violated bound, refused certificate,
exhausted budget) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

from ._parallel import default_threads
from .certificates import (
    ENUMERATION_BUDGET,
    certificate_dict,
    enumerate_disjoint_htrees,
    enumerate_simple_cycles,
)
from .engine import (
    SCHEDULES,
    ListAssignment,
    RunInput,
    RunTrace,
    default_p,
    estimate_success,
    run_list_recolor,
    run_recolor,
    sample_input,
    verify_proper,
)
from .errors import HypergraphError, IntegrityError, PreconditionError, ResourceError
from .hypergraph import Hypergraph, degree_profile, gen_named, gen_random_simple
from .locallemma import (
    ParamSet,
    bound_table,
    evaluate,
    max_admissible_D,
    paper_degree,
    reports_to_csv,
)
from .vdw import bound_vs_exact_table, generate_ap_hypergraph, validate_ap_props, vdw_exact, vdw_randomized

DEFAULT_SEED = 20240917
SEED_ENV = "HGRECOLOR_SEED"

__all__ = ["main", "build_parser", "dumps_json", "dumps_csv", "read_artifact", "DEFAULT_SEED", "SEED_ENV"]


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# structured I/O


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return v


def dumps_csv(rows: list[dict]) -> str:
    """Rows as CSV; the header is the union of keys in first-seen order."""
    fields: list[str] = []
    for row in rows:
        for k in row:
            if k not in fields:
                fields.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: _cell(row.get(k)) for k in fields})
    return buf.getvalue()


def read_artifact(path: str):
    """Read anything the CLI writes: JSON into Python objects, CSV into a list of string dicts."""
    text = sys.stdin.read() if path == "-" else open(path).read()
    if text.lstrip()[:1] in ("{", "["):
        return json.loads(text)
    return list(csv.DictReader(io.StringIO(text)))


def _load_hypergraph(path: str) -> Hypergraph:
    data = read_artifact(path)
    if not isinstance(data, dict):
        raise HypergraphError(f"{path}: expected a hypergraph object")
    return Hypergraph.from_dict(data)


def _extract_coloring(data) -> list[int]:
    if isinstance(data, list):
        return [int(c) for c in data]
    if isinstance(data, dict):
        for key in ("coloring", "final_coloring", "witness"):
            if data.get(key) is not None:
                return [int(c) for c in data[key]]
        if isinstance(data.get("trace"), dict):
            return _extract_coloring(data["trace"])
    raise UsageError("--coloring: no coloring found (expected a list or a coloring/final_coloring/witness key)")


# ---------------------------------------------------------------------------
# commands; each returns (payload, exit status)


def cmd_gen(a):
    if sum(x is not None and x is not False for x in (a.named, a.ap, a.random)) != 1:
        raise UsageError("gen: give exactly one of --named, --ap, --random")
    if a.named:
        return {"format": "json", "data": gen_named(a.named, a.n or 3).to_dict()}, 0
    n = _need(a, "n")
    if a.ap:
        return {"format": "json", "data": generate_ap_hypergraph(n, _need(a, "M")).to_dict()}, 0
    edges = _need(a, "edges")
    vertices = _need(a, "vertices")
    cap = a.D if a.D is not None else edges
    res = gen_random_simple(n, vertices, edges, cap, a.seed)
    data = res.hypergraph.to_dict()
    data["generation"] = {"complete": res.complete, "attempts": res.attempts, "degree_cap": cap, "seed": a.seed}
    return {"format": "json", "data": data}, 0 if res.complete else 1


def _p_for(a, n: int) -> float:
    return a.p if a.p is not None else default_p(n)


def cmd_color(a):
    h = _load_hypergraph(a.hypergraph)
    p = _p_for(a, h.n)
    if a.trials is not None:
        est = estimate_success(h, a.r, p, a.trials, a.seed, a.threads, a.schedule)
        row = {"n": h.n, "r": a.r, "p": p, "trials": est.trials, "successes": est.successes,
               "fraction": est.fraction, "ci_low": est.ci_low, "ci_high": est.ci_high, "seed": a.seed}
        return {"data": row, "rows": [row]}, 0
    if a.input:
        raw = read_artifact(a.input)
        inp = RunInput.from_dict(raw["input"] if "input" in raw else raw)
    else:
        inp = sample_input(h, a.r, p, a.seed)
    if a.lists:
        lists = ListAssignment(tuple(tuple(L) for L in read_artifact(a.lists)))
        trace = run_list_recolor(h, lists, inp, a.seed, a.schedule)
    else:
        inp.check_for(h)
        trace = run_recolor(h, inp, a.schedule)
    data = {"input": inp.to_dict(), "input_digest": inp.digest(), "schedule": a.schedule,
            "trace": trace.to_dict(), "verdict": "Proper" if trace.proper else "Failed"}
    row = {"r": inp.r, "p": inp.p, "events": len(trace.events), "verdict": data["verdict"],
           "failed_edges": list(trace.outcome.failed_edges), "input_digest": data["input_digest"]}
    return {"data": data, "rows": [row]}, 0 if trace.proper else 1


def cmd_verify(a):
    h = _load_hypergraph(a.hypergraph)
    coloring = _extract_coloring(read_artifact(a.coloring))
    out = verify_proper(h, coloring)
    data = {"verdict": "Proper" if out.proper else "Failed", "outcome": out.to_dict()}
    return {"data": data, "rows": [{"verdict": data["verdict"], "failed_edges": list(out.failed_edges)}]}, (
        0 if out.proper else 1
    )


def cmd_certify(a):
    h = _load_hypergraph(a.hypergraph)
    raw = read_artifact(a.run)
    inp = RunInput.from_dict(raw["input"])
    if "input_digest" in raw and raw["input_digest"] != inp.digest():
        raise IntegrityError("embedded input digest does not match the input")
    trace = RunTrace.from_dict(raw["trace"])
    cert = certificate_dict(h, trace, inp)
    cert["trace"] = trace.to_dict()
    ok = cert["extraction_refused"] is None and all(t["is_complete"] for t in cert["htrees"])
    cert["verdict"] = ("Proper" if trace.proper else "Certified") if ok else "Uncertified"
    rows = [{"failed_edge": t["failed_edge"], "size": len(t["tree"]["labels"]), "is_complete": t["is_complete"]}
            for t in cert["htrees"]]
    return {"data": cert, "rows": rows}, 0 if ok else 1


def cmd_enumerate(a):
    h = _load_hypergraph(a.hypergraph)
    delta = degree_profile(h).max_edge_degree
    budget = a.budget if a.budget is not None else ENUMERATION_BUDGET
    vertices = [a.vertex] if a.vertex is not None else range(h.vertex_count)
    kinds = ["htrees", "cycles"] if a.kind == "both" else [a.kind]
    rows = []
    for kind in kinds:
        sizes = a.size or ([1, 2, 3] if kind == "htrees" else [2, 3])
        for N in sizes:
            best, arg = -1, None
            for v in vertices:
                if kind == "htrees":
                    c = len(enumerate_disjoint_htrees(h, v, N, budget))
                else:
                    c = len(enumerate_simple_cycles(h, v, N, budget=budget))
                if c > best:
                    best, arg = c, v
            bound = (4 * delta) ** N if kind == "htrees" else N * delta ** (N - 1) * h.n**2
            rows.append({"kind": kind, "N": N, "max_count": best, "vertex": arg, "Delta": delta,
                         "n": h.n, "bound": bound, "ok": best <= bound})
    return {"data": {"rows": rows}, "rows": rows}, 0 if all(r["ok"] for r in rows) else 1


def cmd_analyze(a):
    n = _need(a, "n")
    p = _p_for(a, n)
    if a.search_alpha:
        res = max_admissible_D(n, a.r, p, a.variant)
        reports = res.trajectory
        data = {"n": n, "r": a.r, "p": p, "variant": a.variant, "D": str(res.D), "alpha": res.alpha,
                "beta": res.beta, "m_bound": res.m_bound, "trajectory": [rep.to_dict() for rep in reports]}
        status = 0 if reports[-1].condition_met else 1
        return {"data": data, "csv_text": reports_to_csv(reports), "default": "csv"}, status
    D = a.D if a.D is not None else paper_degree(n, a.r)
    rep = evaluate(ParamSet(n, a.r, D, p), a.variant)
    return {"data": rep.to_dict(), "csv_text": reports_to_csv([rep])}, 0


def cmd_vdw(a):
    n = _need(a, "n")
    if a.exact:
        res = vdw_exact(n, a.r, max_nodes=a.max_nodes, time_limit=a.budget)
        status = 0 if res.complete else 1
        row = {"n": n, "r": a.r, "W": res.exact_value, "witness_length": res.M, "nodes": res.nodes,
               "complete": res.complete}
    else:
        res = vdw_randomized(n, a.r, _need(a, "M"), a.trials or 1000, a.p, a.seed, a.threads)
        status = 0 if res.witness is not None else 1
        row = res.csv_row()
    return {"data": res.to_dict(), "rows": [row]}, status


def cmd_props(a):
    n = _need(a, "n")
    M = _need(a, "M")
    Ms = range(1, M + 1) if a.sweep else [M]
    reports = [validate_ap_props(n, m) for m in Ms]
    rows = []
    for rep in reports:
        d = rep.to_dict()
        checks = d.pop("checks")
        d.update(checks)
        rows.append(d)
    data = reports[0].to_dict() if not a.sweep else {"reports": [rep.to_dict() for rep in reports]}
    return {"data": data, "rows": rows}, 0 if all(rep.ok for rep in reports) else 1


def _parse_pairs(text: str):
    out = []
    for chunk in text.replace(";", " ").split():
        n, r = chunk.split(",")
        out.append((int(n), int(r)))
    if not out:
        raise UsageError("--vdw-rows: expected pairs like 3,2 4,2")
    return out


def cmd_table(a):
    if a.vdw_rows:
        rows = bound_vs_exact_table(_parse_pairs(a.vdw_rows), a.p, a.max_nodes)
        return {"data": {"rows": rows}, "rows": rows}, 0 if all(r["consistent"] for r in rows) else 1
    rows = bound_table(_need(a, "n"), a.r, a.p)
    return {"data": {"rows": rows}, "rows": rows}, 0


COMMANDS = {
    "gen": cmd_gen,
    "color": cmd_color,
    "verify": cmd_verify,
    "certify": cmd_certify,
    "enumerate": cmd_enumerate,
    "analyze": cmd_analyze,
    "vdw": cmd_vdw,
    "props": cmd_props,
    "table": cmd_table,
}


def _need(a, name: str):
    v = getattr(a, name, None)
    if v is None:
        flag = {"n": "-n", "M": "-M", "r": "-r"}.get(name, "--" + name.replace("_", "-"))
        raise UsageError(f"{a.command}: {flag} is required")
    return v


# ---------------------------------------------------------------------------
# parser


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--seed", type=int, default=None,
                   help=f"master seed (default: ${SEED_ENV} if set, else {DEFAULT_SEED})")
    g.add_argument("--threads", type=_positive, default=None,
                   help="worker processes for independent trials (default: CPU count); results do not depend on it")
    g.add_argument("--format", choices=("json", "csv"), default=None, help="output format (default: json)")
    g.add_argument("--budget", type=float, default=None,
                   help="enumerate: max partial structures visited; vdw --exact: wall-clock seconds")
    g.add_argument("--out", "-o", default=None, help="write the output here instead of stdout")
    g.add_argument("--log", default=None, help="append a JSON line with timing to this sidecar file")
    g.add_argument("-n", type=int, default=None, help="edge size / progression length")
    g.add_argument("-r", type=int, default=2, help="number of colors (default 2)")
    g.add_argument("-M", type=int, default=None, help="size of the ground set [M]")
    g.add_argument("-p", type=float, default=None, help="free threshold (default min(5 ln n / n, 0.49))")
    g.add_argument("-D", type=int, default=None, help="edge-degree bound")
    g.add_argument("--trials", type=_positive, default=None, help="number of independent random trials")

    parser = argparse.ArgumentParser(
        prog="hgrecolor",
        description="Random recoloring of uniform hypergraphs: runs, certificates, Local Lemma bounds, Van der Waerden.",
        epilog="Exit status: 0 success, 1 domain failure, 2 usage error.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("gen", parents=[common], help="generate a hypergraph file")
    s.add_argument("--named", default=None, help="fano, triangle, complete_small, path(k), star(k), disjoint(k)")
    s.add_argument("--ap", action="store_true", help="all n-term progressions in [M]")
    s.add_argument("--random", action="store_true", help="random simple hypergraph, edge degree capped by -D")
    s.add_argument("--vertices", type=_positive, default=None, help="vertex count for --random")
    s.add_argument("--edges", type=_positive, default=None, help="target edge count for --random")

    s = sub.add_parser("color", parents=[common], help="run the recoloring algorithm")
    s.add_argument("--hypergraph", "-H", required=True)
    s.add_argument("--input", default=None, help="RunInput JSON (or a previous color output) instead of sampling")
    s.add_argument("--lists", default=None, help="JSON list of color lists; runs the list-coloring variant")
    s.add_argument("--schedule", choices=sorted(SCHEDULES), default="min_sigma")

    s = sub.add_parser("verify", parents=[common], help="check a coloring for monochromatic edges")
    s.add_argument("--hypergraph", "-H", required=True)
    s.add_argument("--coloring", required=True, help="JSON list, or a color/vdw output file")

    s = sub.add_parser("certify", parents=[common], help="blame graph and complete h-trees of a run")
    s.add_argument("--hypergraph", "-H", required=True)
    s.add_argument("--run", required=True, help="output of color (or of certify)")

    s = sub.add_parser("enumerate", parents=[common], help="exhaustive h-tree and cycle counts against their bounds")
    s.add_argument("--hypergraph", "-H", required=True)
    s.add_argument("--kind", choices=("htrees", "cycles", "both"), default="both")
    s.add_argument("--size", type=_positive, action="append", default=None, help="N to count (repeatable)")
    s.add_argument("--vertex", "-v", type=int, default=None, help="only this vertex (default: max over all)")

    s = sub.add_parser("analyze", parents=[common], help="local-polynomial report, or a search for the largest D")
    s.add_argument("--variant", choices=("simple", "ap"), default="simple")
    s.add_argument("--search-alpha", action="store_true", help="binary-search the largest admissible D (CSV trajectory)")

    s = sub.add_parser("vdw", parents=[common], help="Van der Waerden: randomized witness or exact value")
    s.add_argument("--exact", action="store_true")
    s.add_argument("--max-nodes", type=_positive, default=10**8, help="node budget for --exact")

    s = sub.add_parser("props", parents=[common], help="degree and overlap checks of the progression hypergraph")
    s.add_argument("--sweep", action="store_true", help="check every M' in 1..M")

    s = sub.add_parser("table", parents=[common], help="bound table, or bound-vs-exact Van der Waerden rows")
    s.add_argument("--vdw-rows", default=None, help='pairs "n,r", e.g. "3,2 4,2 3,3"')
    s.add_argument("--max-nodes", type=_positive, default=10**8)
    return parser


def _render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps_json(payload["data"])
    if "csv_text" in payload:
        return payload["csv_text"]
    rows = payload.get("rows")
    if rows is None:
        data = payload["data"]
        rows = data if isinstance(data, list) else [data]
    return dumps_csv(rows)


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    start = time.monotonic()
    try:
        if a.seed is None:
            a.seed = _default_seed()
        if a.threads is None:
            a.threads = default_threads()
        if a.command == "enumerate" and a.budget is not None:
            a.budget = int(a.budget)
        payload, status = COMMANDS[a.command](a)
        fmt = a.format or payload.get("default") or payload.get("format") or "json"
        text = _render(payload, fmt)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hgrecolor: error: {exc}", file=sys.stderr)
        return 2
    except (ResourceError, IntegrityError, PreconditionError) as exc:
        print(f"hgrecolor: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (HypergraphError, ValueError, KeyError, OSError) as exc:
        print(f"hgrecolor: error: {exc}", file=sys.stderr)
        return 2
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if a.log:
        with open(a.log, "a") as fh:
            fh.write(json.dumps({"command": a.command, "status": status, "elapsed_s": time.monotonic() - start,
                                 "finished_at": time.time()}) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
