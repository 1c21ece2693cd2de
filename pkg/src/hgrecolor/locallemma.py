"""Local-polynomial evaluation, admissible-degree search and bound tables.

Every quantity is carried as a natural logarithm so that degrees such as
``n * r**(n-1)`` for n in the thousands stay representable. A geometric
series whose ratio reaches 1 is reported as divergent instead of as ``inf``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

from .engine import default_p
from .errors import ResourceError

__all__ = [
    "ParamSet",
    "LogTerm",
    "PolyReport",
    "EventSystem",
    "AdmissibleResult",
    "eval_w_D",
    "eval_w_CT",
    "eval_w_DT",
    "eval_w_EC",
    "evaluate",
    "check_condition",
    "max_admissible_D",
    "paper_degree",
    "brute_force_avoidance",
    "local_polynomials",
    "lemma_condition",
    "random_event_system",
    "bound_table",
    "reports_to_csv",
    "PAPER_ALPHA",
]

NEG_INF = -math.inf
PAPER_ALPHA = (2 * math.e) ** -4


def _log(x) -> float:
    """Natural log accepting big integers; log(0) is -inf."""
    return NEG_INF if x == 0 else math.log(x)


@dataclass(frozen=True)
class ParamSet:
    n: int
    r: int
    D: int
    p: float

    def __post_init__(self):
        if self.n < 2 or self.r < 2:
            raise ValueError("need n >= 2 and r >= 2")
        if self.D < 0:
            raise ValueError("D must be non-negative")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")

    @property
    def tau0(self) -> float:
        return 1.0 / self.n

    @property
    def z0(self) -> float:
        return 1.0 / (1.0 - self.tau0)

    @property
    def log_z0(self) -> float:
        return math.log(self.n) - math.log(self.n - 1)


class LogTerm(NamedTuple):
    """Natural log of a polynomial contribution; ``divergent`` marks a ratio >= 1."""

    log_value: float
    divergent: bool = False

    @property
    def value(self) -> float:
        return math.exp(self.log_value) if not self.divergent else math.inf


def eval_w_D(params: ParamSet) -> LogTerm:
    """Degenerate-and-dangerous edges: ``D 2^n r^(1-n) C(n, floor(n/2)) p^(n/2) z0^n``."""
    n, r = params.n, params.r
    log_binom = math.lgamma(n + 1) - math.lgamma(n // 2 + 1) - math.lgamma(n - n // 2 + 1)
    val = (
        _log(params.D)
        + n * math.log(2)
        + (1 - n) * math.log(r)
        + log_binom
        + (n / 2) * math.log(params.p)
        + n * params.log_z0
    )
    return LogTerm(val)


def _log_ratio(params: ParamSet) -> float:
    """log of ``8 D z0^n / (n r^(n-1))``, the ratio of the tree series."""
    n, r = params.n, params.r
    return math.log(8) + _log(params.D) + n * params.log_z0 - math.log(n) - (n - 1) * math.log(r)


def eval_w_CT(params: ParamSet) -> LogTerm:
    """Complete disjoint trees, closed form ``(n (1-p)^(n/2) / 2) q / (1-q)``."""
    lq = _log_ratio(params)
    if lq >= 0:
        return LogTerm(math.inf, True)
    n = params.n
    val = math.log(n / 2) + (n / 2) * math.log1p(-params.p) + lq - math.log1p(-math.exp(lq))
    return LogTerm(val)


def eval_w_DT(params: ParamSet) -> LogTerm:
    """Downward complete disjoint trees of size at least ``ceil(ln n)``: ``(n/2) q^ceil(ln n) / (1-q)``."""
    lq = _log_ratio(params)
    if lq >= 0:
        return LogTerm(math.inf, True)
    n = params.n
    k = math.ceil(math.log(n))
    val = math.log(n / 2) + (k * lq if k else 0.0) - math.log1p(-math.exp(lq))
    return LogTerm(val)


def cycle_lengths(n: int) -> list[int]:
    """Cycle lengths N with ``3 <= N < 2 ln n``."""
    bound = 2 * math.log(n)
    return [N for N in range(3, math.ceil(bound) + 1) if N < bound]


def _cycle_log_ratio(params: ParamSet) -> float:
    """log of ``2 (1+p)^(n-1) D z0^n / (n^6 r^(n-1))``, the ratio bounding the cycle sums."""
    n, r, p = params.n, params.r, params.p
    return (
        math.log(2) + (n - 1) * math.log1p(p) + _log(params.D) + n * params.log_z0
        - 6 * math.log(n) - (n - 1) * math.log(r)
    )


def eval_w_EC(params: ParamSet, variant: str = "simple") -> LogTerm:
    """Bad-cycle contributions, summed term by term over ``3 <= N < 2 ln n``.

    ``variant`` is ``"simple"``, ``"ap0"``, ``"ap1"`` or ``"ap2"``. The finite
    sums are always finite; ``divergent`` is set when the ratio that bounds
    them reaches 1.
    """
    n, r, p = params.n, params.r, params.p
    lD = _log(params.D)
    lz = params.log_z0
    ln = math.log(n)
    lr = math.log(r)
    l1p = math.log1p(p)
    lb = l1p - lr  # log((1+p)/r)
    if variant == "ap0":
        return LogTerm(lD + 4 * ln + lr + 1.5 * n * lb + 2 * n * lz)
    Ns = cycle_lengths(n)
    terms = []
    for N in Ns:
        if variant == "simple":
            t = (math.log(N) + (N - 1) * lD + 2 * ln + lr + N * math.log(2)
                 + (n - 1) * N * lb + N * n * lz)
        elif variant == "ap1":
            t = (math.log(N) + (N - 1) * lD + 4 * ln + lr + (N - 1) * math.log(2)
                 + ((n - 1) * (N - 1) + n / 2) * lb + n * N * lz)
        elif variant == "ap2":
            t = (math.log(N) + (N - 2) * lD + 8 * ln + lr + (N - 2) * math.log(2)
                 + (N - 1) * (n - 1) * lb + n * N * lz)
        else:
            raise ValueError(f"unknown cycle variant {variant!r}")
        terms.append(t)
    val = float(logsumexp(terms)) if terms and max(terms) > NEG_INF else NEG_INF
    return LogTerm(val, bool(Ns) and _cycle_log_ratio(params) >= 0)


@dataclass(frozen=True)
class PolyReport:
    params: ParamSet
    variant: str
    terms: dict
    log_total: float
    condition_met: bool

    @property
    def divergent(self) -> dict:
        return {k: t.divergent for k, t in self.terms.items()}

    def value(self, name: str) -> float:
        return self.terms[name].value

    def to_dict(self) -> dict:
        return {
            "n": self.params.n,
            "r": self.params.r,
            "p": self.params.p,
            "D": str(self.params.D),
            "variant": self.variant,
            "log_terms": {k: t.log_value for k, t in self.terms.items()},
            "divergent": self.divergent,
            "log_total": self.log_total,
            "tau0": self.params.tau0,
            "condition_met": self.condition_met,
        }


def evaluate(params: ParamSet, variant: str = "simple") -> PolyReport:
    """All contributions at z0 for ``"simple"`` (cycle term EC) or ``"ap"`` (EC0, EC1, EC2)."""
    terms = {"w_D": eval_w_D(params), "w_CT": eval_w_CT(params), "w_DT": eval_w_DT(params)}
    if variant == "simple":
        terms["w_EC"] = eval_w_EC(params, "simple")
    elif variant == "ap":
        for k in ("ap0", "ap1", "ap2"):
            terms["w_EC" + k[-1]] = eval_w_EC(params, k)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if any(t.divergent for t in terms.values()):
        total = math.inf
    else:
        logs = [t.log_value for t in terms.values()]
        total = float(logsumexp(logs)) if max(logs) > NEG_INF else NEG_INF
    report = PolyReport(params, variant, terms, total, False)
    return PolyReport(params, variant, terms, total, check_condition(report, params))


def check_condition(report: PolyReport, params: ParamSet) -> bool:
    """No divergent contribution and total at most tau0 = 1/n."""
    if any(t.divergent for t in report.terms.values()):
        return False
    return report.log_total <= math.log(params.tau0)


def paper_degree(n: int, r: int, constant: float = PAPER_ALPHA) -> int:
    """``floor(constant * n * r^(n-1))`` in exact integer arithmetic for rational-enough constants."""
    from fractions import Fraction

    return math.floor(Fraction(constant) * n * r ** (n - 1))


@dataclass(frozen=True)
class AdmissibleResult:
    D: int
    n: int
    r: int
    p: float
    variant: str
    trajectory: list = field(default_factory=list, compare=False)

    @property
    def log_alpha(self) -> float:
        return _log(self.D) - math.log(self.n) - (self.n - 1) * math.log(self.r)

    @property
    def alpha(self) -> float:
        """``D / (n r^(n-1))``."""
        return math.exp(self.log_alpha)

    @property
    def m_bound(self) -> int:
        """Largest M with ``n M - 1 <= D``; progression hypergraphs on [M] then have edge degree at most D."""
        return (self.D + 1) // self.n

    @property
    def beta(self) -> float:
        """``m_bound / r^(n-1)``."""
        return math.exp(_log(self.m_bound) - (self.n - 1) * math.log(self.r))


def max_admissible_D(n: int, r: int, p: float | None = None, variant: str = "simple") -> AdmissibleResult:
    """Largest integer D for which the local-polynomial condition holds (0 if none).

    Every contribution is nondecreasing in D, so a binary search is exact.
    The upper end is the convergence threshold ``8 D z0^n < n r^(n-1)`` of the
    tree series, computed in integers.
    """
    if p is None:
        p = default_p(n)
    trajectory = []

    def ok(D):
        rep = evaluate(ParamSet(n, r, D, p), variant)
        trajectory.append(rep)
        return rep.condition_met

    # 8 D (n/(n-1))^n < n r^(n-1)  <=>  8 D n^n < n r^(n-1) (n-1)^n
    hi = (n * r ** (n - 1) * (n - 1) ** n) // (8 * n**n) + 1
    lo = 0
    if not ok(0):
        return AdmissibleResult(0, n, r, p, variant, trajectory)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid - 1
    ok(lo)
    return AdmissibleResult(lo, n, r, p, variant, trajectory)


def reports_to_csv(reports: Sequence[PolyReport]) -> str:
    names = []
    for rep in reports:
        for k in rep.terms:
            if k not in names:
                names.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "r", "p", "D"] + [f"log_{k}" for k in names] + ["log_total", "condition_met"])
    for rep in reports:
        row = [rep.params.n, rep.params.r, repr(rep.params.p), str(rep.params.D)]
        row += [repr(rep.terms[k].log_value) if k in rep.terms else "" for k in names]
        row += [repr(rep.log_total), int(rep.condition_met)]
        w.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Exhaustive oracle on small event systems


@dataclass(frozen=True)
class EventSystem:
    """Independent uniform variables over finite domains and events on them.

    ``events[k]`` is ``(scope, predicate)``: ``predicate`` maps the tuple of
    scope values to ``True`` when the event happens. Instead of a callable it
    may be a set of value tuples (the occurring assignments).
    """

    domains: tuple[tuple, ...]
    events: tuple

    def __post_init__(self):
        object.__setattr__(self, "domains", tuple(tuple(d) for d in self.domains))
        evs = []
        for scope, pred in self.events:
            scope = tuple(scope)
            if not scope:
                raise ValueError("event scopes must be non-empty")
            if any(not 0 <= i < len(self.domains) for i in scope):
                raise ValueError("event scope refers to an unknown variable")
            if not callable(pred):
                pred = _member_predicate(frozenset(map(tuple, pred)))
            evs.append((scope, pred))
        object.__setattr__(self, "events", tuple(evs))

    def happens(self, k: int, assignment: Sequence) -> bool:
        scope, pred = self.events[k]
        return bool(pred(tuple(assignment[i] for i in scope)))

    def probability(self, k: int) -> float:
        scope, pred = self.events[k]
        doms = [self.domains[i] for i in scope]
        total = math.prod(len(d) for d in doms)
        return sum(bool(pred(vals)) for vals in product(*doms)) / total

    def minimal_scope(self, k: int) -> tuple[int, ...]:
        """Variables the event actually depends on."""
        scope, pred = self.events[k]
        doms = [self.domains[i] for i in scope]
        table = {vals: bool(pred(vals)) for vals in product(*doms)}
        keep = []
        for pos, var in enumerate(scope):
            relevant = False
            for vals, hit in table.items():
                for alt in doms[pos]:
                    if alt != vals[pos] and table[vals[:pos] + (alt,) + vals[pos + 1:]] != hit:
                        relevant = True
                        break
                if relevant:
                    break
            if relevant:
                keep.append(var)
        return tuple(keep)


class _member_predicate:
    def __init__(self, accepted):
        self.accepted = accepted

    def __call__(self, vals):
        return vals in self.accepted


def brute_force_avoidance(system: EventSystem, cap: int = 10**6):
    """Search every assignment for one avoiding all events.

    Returns ``(True, witness)`` or ``(False, None)``.
    """
    space = math.prod(len(d) for d in system.domains)
    if space > cap:
        raise ResourceError(f"assignment space {space} exceeds cap {cap}")
    for assignment in product(*system.domains):
        if not any(system.happens(k, assignment) for k in range(len(system.events))):
            return True, assignment
    return False, None


def local_polynomials(system: EventSystem) -> list[dict[int, float]]:
    """``w_X`` for every variable X as ``{degree: coefficient}``."""
    polys: list[dict[int, float]] = [dict() for _ in system.domains]
    for k in range(len(system.events)):
        pr = system.probability(k)
        if pr == 0:
            continue
        vbl = system.minimal_scope(k)
        for x in vbl:
            polys[x][len(vbl)] = polys[x].get(len(vbl), 0.0) + pr
    return polys


def lemma_condition(system: EventSystem, grid: int = 2000):
    """Check ``w(1/(1-tau)) <= tau`` for some tau in (0, 1).

    ``w`` takes, degree by degree, the largest coefficient over all local
    polynomials, so it dominates each of them for z >= 1. Returns
    ``(holds, tau)`` with the best tau on the grid. A certain event that
    depends on no variable appears in no local polynomial; it makes the
    condition fail (tau is then nan).
    """
    # an event determined by no variable is constant; a certain one can never be avoided
    for k in range(len(system.events)):
        if not system.minimal_scope(k) and system.probability(k) > 0:
            return False, float("nan")
    polys = local_polynomials(system)
    dom: dict[int, float] = {}
    for poly in polys:
        for d, c in poly.items():
            dom[d] = max(dom.get(d, 0.0), c)
    if not dom:
        return True, 0.5
    taus = np.linspace(0, 1, grid + 1)[1:-1]
    z = 1.0 / (1.0 - taus)
    w = sum(c * z**d for d, c in dom.items())
    slack = taus - w
    best = int(np.argmax(slack))
    return bool(slack[best] >= 0), float(taus[best])


def random_event_system(rng: np.random.Generator, n_vars: int, n_events: int, max_scope: int = 4,
                        density: float = 0.1, min_scope: int = 1) -> EventSystem:
    """Binary variables; each event is a random set of assignments on a random scope.

    Scope sizes are uniform in ``min_scope .. max_scope`` (capped at ``n_vars``);
    each assignment of the scope is bad with probability ``density``, and an
    event that drew no bad assignment gets one.
    """
    events = []
    hi = min(max_scope, n_vars)
    lo = min(min_scope, hi)
    for _ in range(n_events):
        k = int(rng.integers(lo, hi + 1))
        scope = tuple(sorted(rng.choice(n_vars, size=k, replace=False).tolist()))
        bad = {vals for vals in product((0, 1), repeat=k) if rng.random() < density}
        if not bad:
            bad = {tuple(int(b) for b in rng.integers(0, 2, size=k))}
        events.append((scope, bad))
    return EventSystem(tuple((0, 1) for _ in range(n_vars)), tuple(events))


# ---------------------------------------------------------------------------
# Bound table


def _row(name, kind, formula, log_value, constant=None, source=None, paper_constant=None):
    return {
        "bound": name,
        "kind": kind,
        "formula": formula,
        "constant": constant,
        "constant_source": source,
        "paper_constant": paper_constant,
        "log10_value": log_value / math.log(10) if log_value > NEG_INF else NEG_INF,
        "value": math.exp(log_value) if log_value < 700 else None,
    }


def bound_table(n: int, r: int, p: float | None = None) -> list[dict]:
    """Lower bounds implied by the recoloring analysis next to known upper bounds.

    Constants come from :func:`max_admissible_D` when the search yields a
    positive value and fall back to ``(2e)^-4`` otherwise; ``constant_source``
    records which.
    """
    if n < 3 or r < 2:
        raise ValueError("need n >= 3 and r >= 2")
    ln_r = math.log(r)

    def pick(res: AdmissibleResult, attr: str):
        val = getattr(res, attr)
        return (val, "searched") if res.D > 0 and val > 0 else (PAPER_ALPHA, "paper")

    alpha, a_src = pick(max_admissible_D(n, r, p, "simple"), "alpha")
    beta, b_src = pick(max_admissible_D(n, r, p, "ap"), "beta")
    alpha_trim, t_src = pick(max_admissible_D(n - 1, r, p, "simple"), "alpha")
    c = alpha_trim**2 / 2

    rows = [
        _row("max_edge_degree_colorable", "lower", "alpha*n*r^(n-1)",
             math.log(alpha) + math.log(n) + (n - 1) * ln_r, alpha, a_src, PAPER_ALPHA),
        _row("erdos_lovasz_edge_degree", "lower", "r^(n-1)/4", (n - 1) * ln_r - math.log(4)),
        _row("kostochka_rodl_edge_degree", "upper", "n^2*r^(n-1)*ln(r)",
             2 * math.log(n) + (n - 1) * ln_r + math.log(ln_r)),
        _row("edge_degree_gap", "ratio", "n*ln(r)/alpha", math.log(n) + math.log(ln_r) - math.log(alpha),
             alpha, a_src),
        _row("max_vertex_degree_noncolorable", "lower", "alpha*r^(n-1)",
             math.log(alpha) + (n - 1) * ln_r, alpha, a_src, PAPER_ALPHA),
        _row("van_der_waerden", "lower", "beta*r^(n-1)", math.log(beta) + (n - 1) * ln_r, beta, b_src,
             PAPER_ALPHA),
        _row("min_edges_noncolorable", "lower", "c*r^(2n-4), c=alpha_(n-1)^2/2",
             math.log(c) + (2 * n - 4) * ln_r, c, t_src, PAPER_ALPHA**2 / 2),
        _row("erdos_lovasz_min_edges", "lower", "r^(2n-4)/(32 n^3)",
             (2 * n - 4) * ln_r - math.log(32) - 3 * math.log(n)),
    ]
    return rows
