"""The rank-2 and rank-3 classification tables as machine-checked data.

Templates live in ``data/tables.jsonl`` (one template per line) with labels
written as signed monomials in the row parameters, e.g. ``-z^2`` or
``z^-1*q``.  This module instantiates templates over concrete parameter
assignments, runs the full verification sweep (arithmeticity, within-row
Weyl equivalence, cross-row distinctness, W^B identification), and
re-derives the rank-3 classes at desk scale by exhaustive search over
root-of-unity labels.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from itertools import product
from math import lcm

from .bicharacter import Bicharacter, DynkinDiagram, diagram as make_diagram
from .equivalence import build_diagram_graph, describe_group, generate_WB
from .exponents import GroupContext, GroupElement
from .groupoid import Caps, is_arithmetic


class ConstraintViolation(ValueError):
    def __init__(self, clause: str):
        super().__init__(f"constraint violated: {clause}")
        self.clause = clause


class DegenerateTemplate(ValueError):
    """An assignment collapses a declared edge (or an attached vertex) to 1."""


# ---------------------------------------------------------------------------
# data model and label words


@dataclass(frozen=True)
class Template:
    table: int
    row: int
    index: int
    kind: str
    vertices: tuple[str, ...]
    edges: tuple[tuple[int, int, str], ...]  # 1-based vertex indices
    constraints: tuple[str, ...]
    params: tuple[tuple[str, tuple[int, ...] | None], ...]
    wb: str | None


@dataclass(frozen=True)
class CatalogEntry:
    table: int
    row: int
    templates: tuple[Template, ...]

    @property
    def params(self) -> tuple[tuple[str, tuple[int, ...] | None], ...]:
        return self.templates[0].params

    @property
    def wb(self) -> str | None:
        return self.templates[0].wb

    @property
    def all_constraints(self) -> tuple[str, ...]:
        seen: list[str] = []
        for t in self.templates:
            for c in t.constraints:
                if c not in seen:
                    seen.append(c)
        return tuple(seen)


@lru_cache(maxsize=1)
def load_catalog() -> tuple[CatalogEntry, ...]:
    text = resources.files("arsys").joinpath("data/tables.jsonl").read_text()
    by_row: dict[tuple[int, int], list[Template]] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        raw = json.loads(line)
        params = tuple(
            (name, None if spec["kind"] == "free" else tuple(spec["orders"]))
            for name, spec in raw["params"].items()
        )
        t = Template(
            table=raw["table"],
            row=raw["row"],
            index=raw["template"],
            kind=raw["kind"],
            vertices=tuple(raw["vertices"]),
            edges=tuple((e[0], e[1], e[2]) for e in raw["edges"]),
            constraints=tuple(raw["constraints"]),
            params=params,
            wb=raw["wb"],
        )
        by_row.setdefault((t.table, t.row), []).append(t)
    entries = []
    for (table, row), templates in sorted(by_row.items()):
        templates.sort(key=lambda t: t.index)
        entries.append(CatalogEntry(table, row, tuple(templates)))
    return tuple(entries)


def get_entry(table: int, row: int) -> CatalogEntry:
    for entry in load_catalog():
        if entry.table == table and entry.row == row:
            return entry
    raise KeyError(f"no catalog entry for table {table}, row {row}")


def rows(table: int) -> tuple[CatalogEntry, ...]:
    return tuple(e for e in load_catalog() if e.table == table)


_FACTOR_RE = re.compile(r"^([a-z])(?:\^(-?\d+))?$")


@lru_cache(maxsize=None)
def parse_label(word: str) -> tuple[int, tuple[tuple[str, int], ...]]:
    w = word.strip()
    sign = 1
    if w.startswith("-"):
        sign = -1
        w = w[1:]
    if w == "1":
        return sign, ()
    factors = []
    for token in w.split("*"):
        m = _FACTOR_RE.match(token)
        if not m:
            raise ValueError(f"bad label word: {word!r}")
        factors.append((m.group(1), int(m.group(2) or "1")))
    return sign, tuple(factors)


def eval_label(word: str, values: dict[str, GroupElement], ctx: GroupContext) -> GroupElement:
    sign, factors = parse_label(word)
    out = ctx.one() if sign == 1 else ctx.minus_one()
    for name, exp in factors:
        if name not in values:
            raise KeyError(f"label {word!r} uses unassigned parameter {name!r}")
        out = out * values[name] ** exp
    return out


def constraint_satisfied(clause: str, values: dict[str, GroupElement], ctx: GroupContext) -> bool:
    c = clause.strip()
    if " !ord " in c:
        name, order_text = (part.strip() for part in c.split("!ord"))
        return values[name].order() != int(order_text)
    if "!=" in c:
        lhs, rhs = (part.strip() for part in c.split("!="))
        return eval_label(lhs, values, ctx) != eval_label(rhs, values, ctx)
    if "=" in c:
        lhs, rhs = (part.strip() for part in c.split("="))
        return eval_label(lhs, values, ctx) == eval_label(rhs, values, ctx)
    raise ValueError(f"unparseable constraint: {clause!r}")


# ---------------------------------------------------------------------------
# assignments


@dataclass(frozen=True)
class Assignment:
    label: str
    context: GroupContext
    values: tuple[tuple[str, GroupElement], ...]

    def as_dict(self) -> dict[str, GroupElement]:
        return dict(self.values)


def _product_clause_params(entry: CatalogEntry) -> tuple[str, ...] | None:
    for clause in entry.all_constraints:
        if "!=" in clause or "!ord" in clause:
            continue
        if "=" in clause:
            lhs, rhs = (part.strip() for part in clause.split("="))
            if rhs == "1" and "*" in lhs:
                return tuple(name for name, _ in parse_label(lhs)[1])
    return None


def _template_degenerate(t: Template, values: dict[str, GroupElement], ctx: GroupContext) -> bool:
    touched = set()
    for i, j, word in t.edges:
        if eval_label(word, values, ctx).is_one:
            return True
        touched.update((i, j))
    for v in sorted(touched):
        if eval_label(t.vertices[v - 1], values, ctx).is_one:
            return True
    return False


def _constraints_pass(t: Template, values: dict[str, GroupElement], ctx: GroupContext) -> bool:
    return all(constraint_satisfied(c, values, ctx) for c in t.constraints)


def valid_templates(entry: CatalogEntry, assignment: Assignment) -> list[int]:
    """Template indices whose constraints hold and which do not degenerate."""
    values, ctx = assignment.as_dict(), assignment.context
    out = []
    for k, t in enumerate(entry.templates):
        if _constraints_pass(t, values, ctx) and not _template_degenerate(t, values, ctx):
            out.append(k)
    return out


def _admissible(entry: CatalogEntry, assignment: Assignment) -> bool:
    """All constraint-passing templates survive, and at least one passes."""
    values, ctx = assignment.as_dict(), assignment.context
    passing = [t for t in entry.templates if _constraints_pass(t, values, ctx)]
    if not passing:
        return False
    return all(not _template_degenerate(t, values, ctx) for t in passing)


def base_assignments(entry: CatalogEntry) -> list[Assignment]:
    """One assignment per torsion-order combination; free parameters become
    independent generic generators (with a product constraint solved for the
    last participant)."""
    torsion = [(name, orders) for name, orders in entry.params if orders is not None]
    free = [name for name, orders in entry.params if orders is None]
    product_params = _product_clause_params(entry)
    derived = None
    if product_params and all(p in free for p in product_params):
        derived = product_params[-1]
    combos = list(product(*(orders for _, orders in torsion))) if torsion else [()]
    out = []
    for combo in combos:
        n_tor = lcm(2, *combo) if combo else 2
        free_rank = len(free) - (1 if derived else 0)
        ctx = GroupContext(free_rank, n_tor)
        values: dict[str, GroupElement] = {}
        for (name, _), order in zip(torsion, combo):
            values[name] = ctx.root_of_unity(order)
        k = 0
        for name in free:
            if name == derived:
                continue
            values[name] = ctx.free_generator(k)
            k += 1
        if derived is not None:
            prod = ctx.one()
            for p in product_params:
                if p != derived:
                    prod = prod * values[p]
            values[derived] = prod.inverse()
        parts = [f"{name}=R{order}" for (name, _), order in zip(torsion, combo)]
        if free:
            parts.insert(0, "generic")
        assignment = Assignment(" ".join(parts) or "generic",
                                ctx, tuple(sorted(values.items())))
        if _admissible(entry, assignment):
            out.append(assignment)
    return out


def special_assignments(entry: CatalogEntry, limit: int = 3) -> list[Assignment]:
    """Deterministic torsion specializations of the free parameters: smallest
    admissible orders first.  Rows without free parameters have none."""
    torsion = [(name, orders) for name, orders in entry.params if orders is not None]
    free = [name for name, orders in entry.params if orders is None]
    if not free or limit <= 0:
        return []
    product_params = _product_clause_params(entry)
    combos = list(product(*(orders for _, orders in torsion))) if torsion else [()]
    out: list[Assignment] = []
    for combo in combos:
        base_orders = [2, *combo]
        if product_params and set(product_params) == set(free):
            for n in range(3, 25):
                if len(out) >= limit:
                    break
                for a in range(1, n - 1):
                    for b in range(a + 1, n):
                        c = (-a - b) % n
                        if c == 0 or not a < b < c:
                            continue
                        ctx = GroupContext(0, lcm(n, *base_orders))
                        z = ctx.root_of_unity(n)
                        values = dict(zip(product_params, (z ** a, z ** b, z ** c)))
                        for (name, _), order in zip(torsion, combo):
                            values[name] = ctx.root_of_unity(order)
                        assignment = Assignment(
                            f"mu{n}^({a},{b},{c})", ctx, tuple(sorted(values.items())))
                        if _admissible(entry, assignment):
                            out.append(assignment)
                            if len(out) >= limit:
                                break
                    if len(out) >= limit:
                        break
        elif len(free) == 1:
            for d in range(2, 13):
                if len(out) >= limit:
                    break
                ctx = GroupContext(0, lcm(d, *base_orders))
                values = {free[0]: ctx.root_of_unity(d)}
                for (name, _), order in zip(torsion, combo):
                    values[name] = ctx.root_of_unity(order)
                assignment = Assignment(f"{free[0]}=R{d}", ctx, tuple(sorted(values.items())))
                if _admissible(entry, assignment):
                    out.append(assignment)
        else:
            for d1 in range(2, 10):
                for d2 in range(d1, 10):
                    if len(out) >= limit:
                        break
                    ctx = GroupContext(0, lcm(d1, d2, *base_orders))
                    values = {free[0]: ctx.root_of_unity(d1), free[1]: ctx.root_of_unity(d2)}
                    for (name, _), order in zip(torsion, combo):
                        values[name] = ctx.root_of_unity(order)
                    assignment = Assignment(
                        f"{free[0]}=R{d1} {free[1]}=R{d2}", ctx, tuple(sorted(values.items())))
                    if _admissible(entry, assignment):
                        out.append(assignment)
                if len(out) >= limit:
                    break
    return out[:limit]


def instantiate(entry: CatalogEntry, template_index: int, assignment: Assignment) -> Bicharacter:
    """Structure-constant matrix of a template: q_ii from vertex labels,
    q_ij the edge label and q_ji = 1 (the twist representative)."""
    t = entry.templates[template_index]
    values, ctx = assignment.as_dict(), assignment.context
    for clause in t.constraints:
        if not constraint_satisfied(clause, values, ctx):
            raise ConstraintViolation(clause)
    if _template_degenerate(t, values, ctx):
        raise DegenerateTemplate(
            f"table {t.table} row {t.row} template {t.index}: an edge label is 1")
    n = len(t.vertices)
    one = ctx.one()
    q = [[one] * n for _ in range(n)]
    for k, word in enumerate(t.vertices):
        q[k][k] = eval_label(word, values, ctx)
    for i, j, word in t.edges:
        a, b = i - 1, j - 1
        q[a][b] = eval_label(word, values, ctx)
    return Bicharacter(ctx, n, tuple(tuple(row) for row in q))


# ---------------------------------------------------------------------------
# full verification run


@dataclass
class RowResult:
    table: int
    row: int
    failures: list[str] = field(default_factory=list)
    checked: int = 0
    wb_matched: tuple[str, ...] | None = None
    wb_order: int | None = None
    base_chis: list[tuple[str, Bicharacter]] = field(default_factory=list)


@dataclass
class VerifyReport:
    failures: list[str]
    rows_verified: int
    templates_checked: int
    wb: dict[tuple[int, int], tuple[tuple[str, ...], int]]
    row13_orders_distinct: bool | None = None

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        lines = [
            f"rows verified: {self.rows_verified}",
            f"template instantiations checked: {self.templates_checked}",
            f"failures: {len(self.failures)}",
        ]
        if self.row13_orders_distinct is not None:
            lines.append(
                "rank-3 row 13: the two torsion orders give "
                + ("distinct" if self.row13_orders_distinct else "one")
                + " Weyl class(es)")
        lines.extend(self.failures)
        return "\n".join(lines)


def _graph_node_keys(chi: Bicharacter, caps: Caps) -> frozenset | None:
    g = build_diagram_graph(chi, caps)
    if not g.is_finite:
        return None
    return frozenset(g.nodes)


def _verify_row(args: tuple[int, int, Caps, int, bool]) -> RowResult:
    table, row, caps, specials, wb_check = args
    entry = get_entry(table, row)
    res = RowResult(table, row)
    assignments = base_assignments(entry)
    if not assignments:
        res.failures.append(f"T{table} row {row}: no admissible base assignment")
        return res
    assignments += special_assignments(entry, specials)

    rep_chis: list[tuple[str, Bicharacter]] = []
    for a_index, assignment in enumerate(assignments):
        idxs = valid_templates(entry, assignment)
        if not idxs:
            res.failures.append(
                f"T{table} row {row} [{assignment.label}]: no valid template")
            continue
        node_sets = {}
        first_chi = None
        for k in idxs:
            chi = instantiate(entry, k, assignment)
            if first_chi is None:
                first_chi = chi
            res.checked += 1
            verdict = is_arithmetic(chi, caps)
            if not verdict.is_yes:
                res.failures.append(
                    f"T{table} row {row} [{assignment.label}] template {k}: "
                    f"{verdict.kind} ({verdict.reason})")
                continue
            keys = _graph_node_keys(chi, caps)
            if keys is None:
                res.failures.append(
                    f"T{table} row {row} [{assignment.label}] template {k}: "
                    "diagram graph breached caps")
                continue
            node_sets[k] = keys
        done = sorted(node_sets)
        for pos, i in enumerate(done):
            for j in done[pos + 1:]:
                if not node_sets[i] & node_sets[j]:
                    res.failures.append(
                        f"T{table} row {row} [{assignment.label}]: templates {i} and {j} "
                        "are not Weyl equivalent")
        if first_chi is not None:
            rep_chis.append((assignment.label, first_chi))
        if wb_check and table == 2 and a_index == 0 and first_chi is not None:
            wb = generate_WB(first_chi, caps)
            if wb.exceeded is not None:
                res.failures.append(
                    f"T{table} row {row}: W^B closure breached cap {wb.exceeded}")
            else:
                desc = describe_group(wb)
                res.wb_matched = desc.matched
                res.wb_order = desc.order
                if entry.wb is not None and entry.wb not in desc.matched:
                    res.failures.append(
                        f"T{table} row {row}: W^B descriptor {desc.matched} "
                        f"(order {desc.order}) does not match expected {entry.wb}")

    # Distinct parameter values within one row are usually distinct classes,
    # but not always: one diagram can be presented with several parameter
    # values (e.g. the rank-2 row with vertex labels q, -1 at orders 3 and
    # 6), so within-row assignment pairs are not asserted non-equivalent.
    # Cross-row distinctness is checked in verify_tables.
    res.base_chis = rep_chis[:2] if (table, row) == (2, 13) else rep_chis[:1]
    return res


def verify_tables(caps: Caps = Caps(), tables: tuple[int, ...] = (1, 2),
                  specials: int = 3, wb_check: bool = True,
                  workers: int | None = None) -> VerifyReport:
    """Run the whole catalog: arithmeticity of every admissible
    instantiation, within-row equivalence, cross-row distinctness, and the
    W^B column of the rank-3 table."""
    tasks = [(e.table, e.row, caps, specials, wb_check)
             for e in load_catalog() if e.table in tables]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_verify_row, tasks))
    else:
        results = [_verify_row(t) for t in tasks]
    results.sort(key=lambda r: (r.table, r.row))

    failures: list[str] = []
    wb: dict[tuple[int, int], tuple[tuple[str, ...], int]] = {}
    checked = 0
    for r in results:
        failures.extend(r.failures)
        checked += r.checked
        if r.wb_matched is not None:
            wb[(r.table, r.row)] = (r.wb_matched, r.wb_order)

    row13_distinct: bool | None = None
    for table in tables:
        reps = []
        for r in results:
            if r.table == table:
                for label, chi in r.base_chis:
                    reps.append((r.row, label, chi))
        if len(reps) < 2:
            continue
        ctx = reps[0][2].context
        for _, _, chi in reps[1:]:
            ctx = ctx.join(chi.context)
        keyed = [(row, label, _graph_node_keys(chi.embed(ctx), caps))
                 for row, label, chi in reps]
        for i in range(len(keyed)):
            for j in range(i + 1, len(keyed)):
                ri, li, ki = keyed[i]
                rj, lj, kj = keyed[j]
                if ki is None or kj is None:
                    failures.append(f"T{table}: graph caps breached for row {ri} or {rj}")
                    continue
                intersects = bool(ki & kj)
                if table == 2 and ri == rj == 13:
                    row13_distinct = not intersects
                    continue
                if ri == rj:
                    continue  # same-row assignment pairs are checked per row
                if intersects:
                    failures.append(
                        f"T{table}: rows {ri} [{li}] and {rj} [{lj}] are "
                        "unexpectedly Weyl equivalent")
    return VerifyReport(failures, len(results), checked, wb, row13_distinct)


# ---------------------------------------------------------------------------
# rank-3 re-derivation by exhaustive search


def _canonical_raw(verts: tuple[int, ...], edges: dict[tuple[int, int], int]) -> tuple:
    best = None
    for perm in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        inverse = [0, 0, 0]
        for k, p in enumerate(perm):
            inverse[p] = k
        v = tuple(verts[p] for p in perm)
        e = tuple(sorted(
            ((min(inverse[i], inverse[j]), max(inverse[i], inverse[j])), t)
            for (i, j), t in edges.items()
        ))
        key = (v, e)
        if best is None or key < best:
            best = key
    return best


def _chi_from_raw(ctx: GroupContext, verts, edges) -> Bicharacter:
    one = ctx.one()
    q = [[one] * 3 for _ in range(3)]
    for k, t in enumerate(verts):
        q[k][k] = GroupElement(ctx, (), t % ctx.torsion_order)
    for (i, j), t in edges.items():
        q[i][j] = GroupElement(ctx, (), t % ctx.torsion_order)
    return Bicharacter(ctx, 3, tuple(tuple(row) for row in q))


_SHAPES = (
    ((0, 1), (1, 2)),
    ((0, 1), (0, 2)),
    ((0, 2), (1, 2)),
    ((0, 1), (0, 2), (1, 2)),
)


def _rank2_is_arithmetic(ctx: GroupContext, v1: int, e: int, v2: int, caps: Caps) -> bool:
    one = ctx.one()
    chi = Bicharacter(ctx, 2, (
        (GroupElement(ctx, (), v1), GroupElement(ctx, (), e)),
        (one, GroupElement(ctx, (), v2)),
    ))
    return is_arithmetic(chi, caps).is_yes


def _classify_chunk(args) -> list[tuple[tuple, bool]]:
    n_tor, caps, chunk = args
    ctx = GroupContext(0, n_tor)
    out = []
    for key, verts, edges in chunk:
        chi = _chi_from_raw(ctx, verts, dict(edges))
        out.append((key, is_arithmetic(chi, caps).is_yes))
    return out


@dataclass
class ClassificationResult:
    torsion_order: int
    keys: tuple[tuple, ...]  # canonical keys of the arithmetic classes
    diagrams: dict[tuple, DynkinDiagram]
    candidates: int
    pruned: int
    checked: int

    def keys_in_context(self, target: GroupContext) -> frozenset:
        return frozenset(d.embed(target).canonical_key() for d in self.diagrams.values())


def classify_rank3(n_tor: int, caps: Caps = Caps(),
                   workers: int | None = None) -> ClassificationResult:
    """Exhaustive scan of connected rank-3 diagrams with labels in mu_N.

    Vertex labels 1 are excluded up front (any attached edge would make the
    reflection exponent undefined).  Candidates whose rank-2 restrictions to
    a basis pair already fail to be arithmetic are pruned (restriction of an
    arithmetic root system is arithmetic); survivors get the full decision.
    """
    ctx = GroupContext(0, n_tor)
    labels = range(1, n_tor)
    seen: dict[tuple, tuple] = {}
    for shape in _SHAPES:
        for verts in product(labels, repeat=3):
            for etuple in product(labels, repeat=len(shape)):
                edges = dict(zip(shape, etuple))
                key = _canonical_raw(verts, edges)
                if key not in seen:
                    seen[key] = (verts, tuple(edges.items()))
    candidates = len(seen)

    rank2: dict[tuple[int, int, int], bool] = {}

    def rank2_ok(v1: int, e: int, v2: int) -> bool:
        k = (min(v1, v2), e, max(v1, v2))
        if k not in rank2:
            rank2[k] = _rank2_is_arithmetic(ctx, k[0], e, k[2], caps)
        return rank2[k]

    survivors = []
    for key, (verts, edges) in sorted(seen.items()):
        if all(rank2_ok(verts[i], t, verts[j]) for (i, j), t in edges):
            survivors.append((key, verts, edges))
    pruned = candidates - len(survivors)

    if workers and workers > 1:
        chunk_size = max(1, len(survivors) // (workers * 8) + 1)
        chunks = [survivors[i:i + chunk_size] for i in range(0, len(survivors), chunk_size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            pieces = list(pool.map(_classify_chunk, [(n_tor, caps, c) for c in chunks]))
        verdicts = [v for piece in pieces for v in piece]
    else:
        verdicts = _classify_chunk((n_tor, caps, survivors))

    yes_keys = sorted(key for key, ok in verdicts if ok)
    diagrams = {}
    lookup = dict((key, (verts, edges)) for key, verts, edges in survivors)
    for key in yes_keys:
        verts, edges = lookup[key]
        diagrams[key] = make_diagram(_chi_from_raw(ctx, verts, dict(edges)))
    return ClassificationResult(n_tor, tuple(yes_keys), diagrams,
                                candidates, pruned, len(survivors))


def rank3_expected_keys(n_tor: int, caps: Caps = Caps()) -> tuple[frozenset, GroupContext]:
    """Canonical keys of every mu_N-expressible rank-3 catalog instantiation.

    Works in the joint context Z/lcm(2, N); a template counts as expressible
    exactly when all its labels land inside the embedded mu_N.
    """
    ctx = GroupContext(0, lcm(2, n_tor))
    scale = ctx.torsion_order // n_tor
    mu_n = [ctx.element((), t * scale) for t in range(1, n_tor)]
    keys = set()
    for entry in rows(2):
        torsion = [(name, orders) for name, orders in entry.params if orders is not None]
        free = [name for name, orders in entry.params if orders is None]
        torsion_choices = []
        for name, orders in torsion:
            elems = []
            for m in orders:
                if n_tor % m == 0:
                    elems.extend(e for e in mu_n if e.order() == m)
            torsion_choices.append((name, elems))
        if any(not elems for _, elems in torsion_choices):
            continue
        product_params = _product_clause_params(entry)
        free_choices: list[list[GroupElement]] = [mu_n] * len(free)
        for combo_t in product(*(elems for _, elems in torsion_choices)) if torsion_choices else [()]:
            for combo_f in product(*free_choices) if free else [()]:
                values = {name: el for (name, _), el in zip(torsion_choices, combo_t)}
                values.update(dict(zip(free, combo_f)))
                if product_params and not all(p in values for p in product_params):
                    continue
                assignment = Assignment("scan", ctx, tuple(sorted(values.items())))
                for k, t in enumerate(entry.templates):
                    if not _constraints_pass(t, values, ctx):
                        continue
                    if _template_degenerate(t, values, ctx):
                        continue
                    labels = [eval_label(w, values, ctx) for w in t.vertices]
                    labels += [eval_label(w, values, ctx) for _, _, w in t.edges]
                    if any(el.tor % scale for el in labels):
                        continue  # not expressible inside mu_N
                    chi = instantiate(entry, k, assignment)
                    keys.add(make_diagram(chi).canonical_key())
    return frozenset(keys), ctx
