from __future__ import annotations

import logging
import re

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import yaml

from latnab.cache import ThetaCache
from latnab.catalog import catalog, catalog_vector
from latnab.config.classes import Config, DesignConfig, IsometryConfig
from latnab.config.policy import IsometryPolicy
from latnab.designs import configuration
from latnab.errors import DomainError, LatticeFormatError, ReproduceMismatchError, UnknownLatticeError
from latnab.exact import format_rational
from latnab.isometry import fingerprint, is_isometric
from latnab.lattice import Lattice, LatticeVector, adjoin, index_in, neighbor, orthogonal_sum
from latnab.overlattice import OverlatticeCensus, bucket_counts, classify_census, integral_overlattices
from latnab.quotient import class_table
from latnab.shells import ThetaSeries, kissing, minimum, theta
from latnab.venkov import venkov_sweep

# Regenerates the tables of one section and compares them cell by cell with the expected values
# in fixtures/section_<n>.yaml. A fixture names the base lattice, the lattices of the section and
# how to build them, and the expected class table, census counts, theta coefficients and
# (d, n, s, t) rows. Cells listed under "typos" are reported apart from the real differences.

FIXTURES = Path(__file__).parent / "fixtures"
SECTIONS = range(0, 9)


def _agrees(expected: Any, computed: Any) -> bool:
    # A strength capped at ">=k" agrees with any printed strength of at least k
    if isinstance(computed, str) and computed.startswith(">="):
        return isinstance(expected, int) and not isinstance(expected, bool) and expected >= int(computed[2:])
    return expected == computed


@dataclass(slots=True)
class Cell:
    table: str
    key: str
    expected: Any
    computed: Any
    source: str
    typo: str | None = None

    @property
    def matches(self) -> bool:
        if isinstance(self.expected, list) and isinstance(self.computed, list):
            # Parts that were not computed are left out of the comparison
            return all(c is None or _agrees(e, c) for e, c in zip(self.expected, self.computed))
        return self.expected == self.computed

    @property
    def partial(self) -> bool:
        return isinstance(self.computed, list) and None in self.computed

    def to_dict(self) -> dict[str, Any]:
        data = {"table": self.table, "cell": self.key, "expected": self.expected, "computed": self.computed,
                "source": self.source}
        if self.typo is not None:
            data["typo"] = self.typo
        return data


@dataclass
class ReproduceReport:
    section: int
    title: str
    fast: bool = False
    cells: list[Cell] = field(default_factory=list)
    generated: dict[str, Any] = field(default_factory=dict)
    expected: dict[str, Any] = field(default_factory=dict)
    skipped: list[str] = field(default_factory=list)
    notes: list[dict[str, Any]] = field(default_factory=list)  # typos that are not table cells

    @property
    def diffs(self) -> list[Cell]:
        return [c for c in self.cells if c.typo is None and not c.matches]

    @property
    def known_typo_flags(self) -> list[dict[str, Any]]:
        flags = [dict(c.to_dict(), matched=c.matches) for c in self.cells if c.typo is not None]
        return flags + self.notes

    @property
    def passed(self) -> bool:
        return not self.diffs

    def to_dict(self) -> dict[str, Any]:
        return {
            "section": self.section,
            "title": self.title,
            "fast": self.fast,
            "passed": self.passed,
            "checked": len(self.cells),
            "partial": sum(1 for c in self.cells if c.partial),
            "diffs": [c.to_dict() for c in self.diffs],
            "known_typo_flags": self.known_typo_flags,
            "skipped": self.skipped,
            "generated": self.generated,
            "expected": self.expected,
        }


def load_fixture(section: int) -> dict[str, Any]:
    if section not in SECTIONS:
        raise DomainError(f"Sections run from {SECTIONS.start} to {SECTIONS.stop - 1}, got {section}.")
    with open(FIXTURES / f"section_{section}.yaml", "r", encoding="utf-8") as f:
        return yaml.safe_load(f)


# Constructions

_TERM_RE = re.compile(r"^(\d*)\*?(eps|e)(\d+)$")


def _term(term: str, L: Lattice, named: dict[str, str]) -> LatticeVector:
    if term in named:
        return construction_vector(named[term], L, {})
    if (m := _TERM_RE.match(term)) is not None:
        k, kind, i = int(m.group(1) or 1), m.group(2), int(m.group(3))
        if not 1 <= i <= L.dim:
            raise LatticeFormatError(f"Index {i} out of range in {term!r} for dimension {L.dim}.")
        if kind == "e":
            return L.e(i) * k
        if L.is_gram_only:
            raise LatticeFormatError(f"{L.name or 'Lattice'} has no orthonormal frame for {term!r}.")
        return LatticeVector.unit(L.dim, i - 1, k)
    try:
        v = catalog_vector(term)
    except UnknownLatticeError:
        raise LatticeFormatError(f"Cannot read {term!r} as a vector.") from None
    if v.dim != L.dim:
        raise LatticeFormatError(f"Glue vector {term} has length {v.dim}, not {L.dim}.")
    return v


def construction_vector(text: str, L: Lattice, named: dict[str, str] | None = None) -> LatticeVector:
    """A vector written as in the tables: 'e1/2', '(e1+e3)/2', 'eps2+eps4', '(e1+2e2)/2', 'f1'.

    eN is the N-th basis vector of L, epsN the N-th unit vector of its frame, other names are the
    section's named vectors or catalog glue vectors.
    """
    named = named or {}
    expr = text.replace(" ", "")
    den = 1
    if (m := re.fullmatch(r"\((.+)\)/(\d+)", expr)) or (m := re.fullmatch(r"([^()]+)/(\d+)", expr)):
        expr, den = m.group(1), int(m.group(2))
    terms = re.findall(r"([+-]?)([^+-]+)", expr)
    if not terms or "".join(s + t for s, t in terms) != expr:
        raise LatticeFormatError(f"Cannot parse construction {text!r}.")
    total = LatticeVector.zero(L.dim)
    for sign, term in terms:
        v = _term(term, L, named)
        total = total - v if sign == "-" else total + v
    return total * Fraction(1, den)


def _build(name: str, entry: dict[str, Any], base: Lattice, named: dict[str, str]) -> Lattice | None:
    if "catalog" in entry:
        return catalog(str(entry["catalog"])).renamed(name)
    if "adjoin" in entry:
        return adjoin(base, [construction_vector(v, base, named) for v in entry["adjoin"]], name)
    # Named through its theta series once the census is classified
    return None


def _expression(text: str, lattices: dict[str, Lattice]) -> Lattice:
    # 'NAME', 'NAME perp NAME' or 'NAME + vector'
    def lookup(name: str) -> Lattice:
        return lattices[name] if name in lattices else catalog(name)
    if " perp " in text:
        return orthogonal_sum(*[lookup(p.strip()) for p in text.split(" perp ")], name=text)
    if " + " in text:
        head, vec = text.split(" + ", 1)
        L = lookup(head.strip())
        return neighbor(L, construction_vector(vec, L), name=text)
    return lookup(text.strip())


# Section runner

class _Section:
    def __init__(self, fixture: dict[str, Any], cfg: Config, fast: bool, cache: ThetaCache | None):
        self.fx = fixture
        self.cfg = cfg
        self.fast = fast
        self.cache = cache
        self.report = ReproduceReport(int(fixture["section"]), str(fixture.get("title", "")), fast)
        self.typos = {(t.get("table"), t.get("lattice"), t.get("norm")): t["note"]
                      for t in fixture.get("typos", []) if t.get("lattice") is not None}
        self.report.notes = [t for t in fixture.get("typos", []) if t.get("lattice") is None or t.get("table") == "definitions"]
        self.named = {str(k): str(v) for k, v in (fixture.get("vectors") or {}).items()}
        self.lattices: dict[str, Lattice] = {}
        self.thetas: dict[str, ThetaSeries] = {}
        self.census: OverlatticeCensus | None = None
        perf = cfg.performance
        if fast:
            perf = perf._replace(pairwise_budget=min(perf.pairwise_budget, cfg.reproduce.fast_design_budget))
        self.perf = perf

    def cell(self, table: str, key: str, expected: Any, computed: Any, source: str,
             lattice: str | None = None, norm: int | None = None) -> None:
        typo = self.typos.get((table, lattice, norm))
        self.report.cells.append(Cell(table, key, expected, computed, source, typo))

    def theta_bound(self, L: Lattice) -> int:
        if self.fast and L.dim >= 16:
            return self.cfg.reproduce.fast_theta_max_norm_dim16
        return self.cfg.reproduce.theta_max_norm

    def run(self) -> ReproduceReport:
        log = logging.getLogger("latnab")
        fx = self.fx
        if "determinants" in fx:
            self.determinants(fx["determinants"])
        if "venkov" in fx:
            self.venkov(fx["venkov"])
        base = catalog(str(fx["base"]))
        for name, entry in (fx.get("lattices") or {}).items():
            L = _build(str(name), entry, base, self.named)
            if L is not None:
                self.lattices[str(name)] = L
        if "classes" in fx:
            self.classes(base, fx["classes"])
        if "census" in fx:
            self.run_census(base, fx["census"])
        if "identities" in fx:
            self.identities(fx["identities"])
        if "theta" in fx:
            self.theta_series(fx["theta"])
        if "designs" in fx:
            self.designs(fx["designs"])
        report = self.report
        report.expected = {k: v for k, v in fx.items() if k in ("determinants", "venkov", "classes", "census", "theta", "designs", "identities")}
        verdict = "passed" if report.passed else f"{len(report.diffs)} differences"
        log.info(f"Section {report.section} ({report.title}): {len(report.cells)} cells, {verdict}, "
                 f"{len(report.known_typo_flags)} known typos, {len(report.skipped)} skipped")
        return report

    def determinants(self, block: dict[str, Any]) -> None:
        out = {}
        for name, value in block["values"].items():
            d = catalog(str(name)).determinant
            out[str(name)] = format_rational(d)
            self.cell("determinants", str(name), format_rational(Fraction(value)), format_rational(d), block["source"])
        self.report.generated["determinants"] = out

    def venkov(self, block: dict[str, Any]) -> None:
        src = block["source"]
        results = venkov_sweep(catalog(str(block["base"])), self.perf)
        bound = int(block["theta_max_norm"])
        local = IsometryConfig(bound, self.cfg.isometry.strict_max_dim, IsometryPolicy.FAST)
        keys = {fingerprint(r.projected, local, self.perf, decomposition=False).key() for r in results}
        P = results[0].projected
        series = theta(P, bound, self.perf, self.cache)
        self.cell("venkov", "projections", int(block["vectors"]), len(results), src)
        self.cell("venkov", "classes", int(block["classes"]), len(keys), src)
        self.cell("venkov", "determinant", format_rational(Fraction(block["determinant"])), format_rational(P.determinant), src)
        self.cell("venkov", "minimum", format_rational(Fraction(block["minimum"])), format_rational(minimum(P, self.perf)), src)
        self.cell("venkov", "kissing", int(block["kissing"]), kissing(P, self.perf), src)
        self._compare_theta("venkov", "projection", block["theta"], series, src)
        self.report.generated["venkov"] = {
            "projections": len(results),
            "classes": len(keys),
            "assumptions": dict(Counter(r.assumption for r in results)),
            "theta": series.to_dict(),
        }

    def classes(self, base: Lattice, block: dict[str, Any]) -> None:
        rows = class_table(base, self.cfg.quotient, self.perf)
        computed = [[r.count, r.paired, format_rational(r.norm), r.order] for r in rows]
        expected = [[int(c), bool(p), str(n), int(o)] for c, p, n, o in block["rows"]]
        self.cell("classes", str(base.name), expected, computed, block["source"])
        self.report.generated["classes"] = [str(r) for r in rows]

    def run_census(self, base: Lattice, block: dict[str, Any]) -> None:
        log = logging.getLogger("latnab")
        src = block["source"]
        census = integral_overlattices(base, self.cfg.quotient, self.perf, self.cfg.census)
        policy = IsometryPolicy.FAST if self.fast else None
        classify_census(census, policy, self.lattices, self.cfg.isometry, self.perf, full_fingerprints=False)
        self._name_by_theta(census)
        self.census = census
        counts = bucket_counts(census)
        self.cell("census", "total", int(block["total"]), census.total, src, lattice="total")
        expected = {str(k): int(v) for k, v in block["buckets"].items()}
        for name in sorted(set(expected) | set(counts)):
            self.cell("census", name, expected.get(name, 0), counts.get(name, 0), src, lattice=name)
        self.report.generated["census"] = {"total": census.total, "buckets": dict(counts)}
        self.report.generated["figures"] = self.figures(census)
        for b in census.buckets:
            if b.name is not None and b.name not in self.lattices:
                self.lattices[b.name] = census.lattice(b.representative, b.name)
        log.debug(f"Census lattices available for theta and designs: {sorted(self.lattices)}")

    def _name_by_theta(self, census: OverlatticeCensus) -> None:
        log = logging.getLogger("latnab")
        for name, entry in (self.fx.get("lattices") or {}).items():
            if "theta" not in entry:
                continue
            want = {Fraction(0): 1} | {Fraction(k): int(v) for k, v in entry["theta"].items() if k <= census.theta_bound}
            matches = [b for b in census.buckets if b.name is None and dict(b.fingerprint.theta_prefix) == want]
            if len(matches) != 1:
                log.warning(f"Theta series of {name} matches {len(matches)} unnamed buckets, left unnamed")
                continue
            matches[0].name = str(name)

    def figures(self, census: OverlatticeCensus) -> list[dict[str, Any]]:
        # Edges from the base to its cyclic overlattices, labelled by the leader norm of the glue class
        edges: Counter[tuple[Fraction, str, int]] = Counter()
        for b in census.buckets:
            for m in b.members:
                if len(m.generators) != 1:
                    continue
                norm = census.class_minimum(m.generators[0], self.perf)
                edges[(norm if norm is not None else Fraction(-1), b.name or "?", m.order)] += 1
        return [
            {"norm": format_rational(n) if n >= 0 else None, "neighbor": name, "index": k, "count": c}
            for (n, name, k), c in sorted(edges.items())
        ]

    def identities(self, block: dict[str, Any]) -> None:
        src = block["source"]
        local = self.cfg.isometry
        if self.fast:
            local = local._replace(theta_bound=self.cfg.census.theta_bound)
        for item in block["items"]:
            left = _expression(str(item["left"]), self.lattices)
            right = _expression(str(item["right"]), self.lattices)
            key = f"{item['left']} {item['check']} {item['right']}"
            match item["check"]:
                case "equal":
                    self.cell("identities", key, True, left == right, src)
                case "index":
                    self.cell("identities", key, int(item["expected"]), index_in(left, right), src)
                case "isometric" | "not-isometric":
                    verdict = is_isometric(left, right, None, local, self.perf)
                    self.cell("identities", key, item["check"], verdict.status.value, src)
                case "same-theta":
                    bound = min(self.theta_bound(left), local.theta_bound)
                    t1 = theta(left, bound, self.perf, self.cache)
                    t2 = theta(right, bound, self.perf, self.cache)
                    self.cell("identities", key, True, t1.coefficients == t2.coefficients, src)
                case other:
                    raise LatticeFormatError(f"Unknown identity check {other!r}.")

    def _compare_theta(self, table: str, name: str, expected: dict[Any, Any], series: ThetaSeries, src: str) -> None:
        want = {Fraction(k): int(v) for k, v in expected.items() if Fraction(k) <= series.max_norm}
        got = {k: v for k, v in series.coefficients.items() if k > 0}
        for m in sorted(set(want) | set(got)):
            self.cell(table, f"{name} q^{format_rational(m)}", want.get(m, 0), got.get(m, 0), src,
                      lattice=name, norm=int(m) if m.denominator == 1 else None)

    def theta_series(self, block: dict[str, Any]) -> None:
        src = block["source"]
        out = {}
        for name, expected in block["series"].items():
            L = self.lattices.get(str(name))
            if L is None:
                self.report.skipped.append(f"theta {name}: lattice not identified")
                continue
            bound = self.theta_bound(L)
            series = theta(L, bound, self.perf, self.cache)
            self.thetas[str(name)] = series
            out[str(name)] = str(series)
            if any(int(k) > bound for k in expected):
                self.report.skipped.append(f"theta {name}: coefficients above q^{bound}")
            self._compare_theta("theta", str(name), expected, series, src)
        self.report.generated["theta"] = out

    def designs(self, block: dict[str, Any]) -> None:
        src = block["source"]
        cfg = self.cfg.design
        if self.fast:
            cfg = DesignConfig(cfg.t_cap, False, cfg.tensor_budget)
        out: dict[str, dict[str, str]] = {}
        for name, rows in block["tables"].items():
            name = str(name)
            L = self.lattices.get(name)
            if L is None:
                self.report.skipped.append(f"designs {name}: lattice not identified")
                continue
            series = self.thetas.get(name)
            for m, row in rows.items():
                m = int(m)
                if self.fast:
                    n = series[m] if series is not None and m <= series.max_norm else None
                    if n is None or n > self.cfg.reproduce.fast_design_budget:
                        self.report.skipped.append(f"designs {name} m={m}: shell above the fast budget")
                        continue
                report = configuration(L, m, cfg, self.perf)
                if report.method == "none":
                    self.report.skipped.append(f"designs {name} m={m}: {report.n} vectors, not computed")
                    continue
                s = None if report.s == "exceeded" else report.s
                t = "-" if report.t == "unbounded" else (None if report.t == "not-computed" else report.t)
                self.cell("designs", f"{name} m={m}", list(row), [report.d, report.n, s, t], src, lattice=name, norm=m)
                out.setdefault(name, {})[str(m)] = report.table_row()
        self.report.generated["designs"] = out


def reproduce_section(
    section: int,
    cfg: Config = Config(),
    fast: bool = False,
    cache: ThetaCache | None = None,
) -> ReproduceReport:
    return _Section(load_fixture(section), cfg, fast, cache).run()


def reproduce(
    sections: list[int] | None = None,
    cfg: Config = Config(),
    fast: bool = False,
    cache: ThetaCache | None = None,
) -> list[ReproduceReport]:
    return [reproduce_section(s, cfg, fast, cache) for s in (sections if sections is not None else list(SECTIONS))]


def require_pass(reports: list[ReproduceReport]) -> None:
    failed = [r for r in reports if not r.passed]
    if failed:
        parts = ", ".join(f"section {r.section} ({len(r.diffs)})" for r in failed)
        raise ReproduceMismatchError(f"Differences outside the known typos in {parts}.")
