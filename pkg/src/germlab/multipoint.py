"""Multiple point spaces of corank-one germs via divided differences.

A germ in normal form sends (x1..x_{n-1}, y) to (x1..x_{n-1}, f_n, f_{n+1}).
Its k-th multiple point space lives in the variables (x, y1..yk); repeating a
branch contributes iterated divided differences of the last two components,
and distinct branches are linked by equality of components at representative
points.  Cycle-type strata identify the y's along the cycles of a chosen
permutation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import factorial
from typing import Optional, Sequence

from .context import ComputeContext
from .errors import (
    CapExceededError,
    EmptyDoublePointsError,
    GermLabError,
    InputError,
    NormalFormViolationError,
    NotIsolatedError,
)
from .local import (
    CAP_EXCEEDED,
    INFINITE,
    LocalIdeal,
    local_quotient_dimension,
    milnor_icis,
    quotient_krull_dimension,
    standard_basis,
)
from .poly import Poly, format_polynomial, substitute
from .symrep import PartitionData, partitions_of

# ---------------------------------------------------------------------------
# Germ descriptions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Branch:
    label: str
    components: tuple[Poly, ...]


@dataclass(frozen=True)
class GermSpec:
    """Corank-one multi-germ in normal form, possibly with one parameter."""

    source_dim: int
    branches: tuple[Branch, ...]
    params: tuple[str, ...] = ()
    name: str = ""

    @property
    def x_variables(self) -> tuple[str, ...]:
        return tuple(f"x{i}" for i in range(1, self.source_dim))

    @property
    def source_variables(self) -> tuple[str, ...]:
        return self.x_variables + ("y",)

    @property
    def poly_variables(self) -> tuple[str, ...]:
        return self.source_variables + self.params

    def validate_normal_form(self) -> None:
        n = self.source_dim
        if n < 1:
            raise NormalFormViolationError("source dimension must be at least 1")
        if len(self.params) > 1:
            raise NormalFormViolationError("at most one parameter is supported")
        labels = [b.label for b in self.branches]
        if len(set(labels)) != len(labels):
            raise NormalFormViolationError("branch base-point labels must be distinct")
        for b in self.branches:
            if len(b.components) != n + 1:
                raise NormalFormViolationError(
                    f"branch {b.label!r} has {len(b.components)} components, expected {n + 1}"
                )
            for i in range(n - 1):
                expected = Poly.variable(self.poly_variables, f"x{i + 1}")
                if b.components[i] != expected:
                    raise NormalFormViolationError(
                        f"branch {b.label!r}: component {i} must be x{i + 1}",
                        branch=b.label,
                        component=i,
                    )
            for i, comp in enumerate(b.components):
                for expo in comp.terms:
                    if all(expo[j] == 0 for j in range(n)):  # no source variable present
                        raise NormalFormViolationError(
                            f"branch {b.label!r}: component {i} does not vanish at the base point",
                            branch=b.label,
                            component=i,
                        )

    def specialize(self, value) -> "GermSpec":
        """Substitute the parameter by an exact rational value."""
        if not self.params:
            return self
        t = self.params[0]
        out = []
        for b in self.branches:
            comps = tuple(
                substitute(c, {t: Fraction(value)}, result_variables=self.source_variables)
                for c in b.components
            )
            out.append(Branch(b.label, comps))
        return GermSpec(self.source_dim, tuple(out), (), self.name)

    def canonical_key(self) -> str:
        parts = [f"germ|{self.name}|{self.source_dim}"]
        for b in self.branches:
            parts.append(b.label + ":" + ";".join(format_polynomial(c) for c in b.components))
        return "|".join(parts)


# ---------------------------------------------------------------------------
# Divided differences
# ---------------------------------------------------------------------------

_h_cache: dict[tuple, Poly] = {}


def complete_homogeneous(degree: int, targets: Sequence[str], ambient: Sequence[str]) -> Poly:
    """Complete homogeneous symmetric polynomial in the target variables,
    expressed in the ambient ring.  Repeated targets merge exponents."""
    ambient = tuple(ambient)
    targets = tuple(targets)
    key = (degree, targets, ambient)
    if key in _h_cache:
        return _h_cache[key]
    if degree < 0:
        result = Poly.zero(ambient)
    elif degree == 0:
        result = Poly.constant(ambient, 1)
    else:
        idx = [ambient.index(t) for t in targets]
        terms: dict[tuple[int, ...], Fraction] = {}

        def rec(pos: int, remaining: int, expo: list[int]):
            if pos == len(idx) - 1:
                e = list(expo)
                e[idx[pos]] += remaining
                key_e = tuple(e)
                terms[key_e] = terms.get(key_e, Fraction(0)) + 1
                return
            for a in range(remaining + 1):
                e = list(expo)
                e[idx[pos]] += a
                rec(pos + 1, remaining - a, e)

        rec(0, degree, [0] * len(ambient))
        result = Poly(ambient, terms)
    _h_cache[key] = result
    return result


def divided_difference(
    f: Poly, yname: str, targets: Sequence[str], ambient: Sequence[str]
) -> Poly:
    """Iterated divided difference of ``f`` in ``yname`` over the targets.

    With i targets this is exact polynomial division iterated i-1 times;
    monomial-wise, y^m contributes its complete homogeneous part of degree
    m - i + 1 in the targets.
    """
    ambient = tuple(ambient)
    i = len(targets)
    yidx = f.variables.index(yname)
    keep = [v for j, v in enumerate(f.variables) if j != yidx]
    for v in keep:
        if v not in ambient:
            raise GermLabError(f"variable {v} missing from stratum ring")
    out = Poly.zero(ambient)
    groups: dict[int, dict[tuple[int, ...], Fraction]] = {}
    for e, c in f.terms.items():
        m = e[yidx]
        rest = tuple(x for j, x in enumerate(e) if j != yidx)
        groups.setdefault(m, {})[rest] = groups.setdefault(m, {}).get(rest, Fraction(0)) + c
    for m, coeff_terms in groups.items():
        h = complete_homogeneous(m - i + 1, targets, ambient)
        if h.is_zero():
            continue
        coeff = Poly(keep, coeff_terms).embedded(ambient)
        out = out + coeff * h
    return out


# ---------------------------------------------------------------------------
# Cycle assignments: a stratum is determined by a multiset of
# (cycle length, branch index) pairs.
# ---------------------------------------------------------------------------

Assignment = tuple[tuple[int, int], ...]  # sorted ((length, branch), ...)


def _sort_assignment(cycles) -> Assignment:
    return tuple(sorted(cycles, key=lambda c: (c[1], -c[0], c)))


def identity_assignment(branch_tuple: Sequence[int]) -> Assignment:
    return _sort_assignment((1, b) for b in branch_tuple)


def enumerate_assignments(gamma: PartitionData, num_branches: int) -> list[Assignment]:
    """All ways of placing the cycles of a cycle type on the branches."""
    by_length: dict[int, int] = {}
    for p in gamma.parts:
        by_length[p] = by_length.get(p, 0) + 1
    lengths = sorted(by_length)
    choices = [
        list(combinations_with_replacement(range(num_branches), by_length[l])) for l in lengths
    ]
    out = []
    for combo in product(*choices):
        cycles = []
        for l, branches in zip(lengths, combo):
            cycles.extend((l, b) for b in branches)
        out.append(_sort_assignment(cycles))
    return sorted(set(out))


def assignment_count(assignment: Assignment) -> int:
    """Number of ordered tuples invariant under a fixed permutation of this
    cycle type that realize the assignment: cycles of equal length are
    interchangeable."""
    by_length: dict[int, dict[int, int]] = {}
    for l, b in assignment:
        by_length.setdefault(l, {}) .setdefault(b, 0)
        by_length[l][b] += 1
    total = 1
    for l, per_branch in by_length.items():
        alpha = sum(per_branch.values())
        ways = factorial(alpha)
        for c in per_branch.values():
            ways //= factorial(c)
        total *= ways
    return total


def assignment_multiset(assignment: Assignment) -> tuple[int, ...]:
    """Branch multiset of the underlying ordered tuple (sorted)."""
    out: list[int] = []
    for l, b in assignment:
        out.extend([b] * l)
    return tuple(sorted(out))


def assignment_gamma(assignment: Assignment) -> PartitionData:
    parts = tuple(sorted((l for l, _ in assignment), reverse=True))
    return PartitionData(sum(parts), parts)


# ---------------------------------------------------------------------------
# Stratum ideals
# ---------------------------------------------------------------------------


def stratum_ideal(f: GermSpec, assignment: Assignment) -> LocalIdeal:
    """Defining ideal of the cycle-type stratum in (x, y1..ym)."""
    if f.params:
        raise InputError("specialize the parameter before computing strata")
    n = f.source_dim
    xs = f.x_variables
    m = len(assignment)
    zvars = tuple(f"y{c + 1}" for c in range(m))
    ambient = xs + zvars

    groups: dict[int, list[int]] = {}
    for c, (_l, b) in enumerate(assignment):
        groups.setdefault(b, []).append(c)

    gens: list[Poly] = []
    for b in sorted(groups):
        word: list[str] = []
        for c in groups[b]:
            word.extend([zvars[c]] * assignment[c][0])
        comps = f.branches[b].components[n - 1 :]
        for i in range(2, len(word) + 1):
            for comp in comps:
                gens.append(divided_difference(comp, "y", word[: i], ambient))

    reps = [zvars[groups[b][0]] for b in sorted(groups)]
    branch_order = sorted(groups)
    for a in range(len(branch_order) - 1):
        b1, b2 = branch_order[a], branch_order[a + 1]
        for ci in range(n - 1, n + 1):
            c1 = f.branches[b1].components[ci]
            c2 = f.branches[b2].components[ci]
            p1 = substitute(c1, {"y": Poly.variable(ambient, reps[a])}, result_variables=ambient)
            p2 = substitute(c2, {"y": Poly.variable(ambient, reps[a + 1])}, result_variables=ambient)
            gens.append(p1 - p2)

    return LocalIdeal(ambient, tuple(gens))


def expected_dimension(f: GermSpec, k: int, num_cycles: int) -> int:
    # target dimension n+1, corank one: dim D^k(f, gamma) = (n+1) - 2k + #cycles
    return (f.source_dim + 1) - 2 * k + num_cycles


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

STATUS_EMPTY = "EMPTY"
STATUS_ZERO_DIM = "ZERO_DIM"
STATUS_ICIS = "ICIS"
STATUS_NEGATIVE_DIM = "NEGATIVE_DIM"
STATUS_VIOLATION = "NOT_A_FINITE_OR_BUG"


@dataclass(frozen=True)
class StratumData:
    k: int
    assignment: Optional[Assignment]
    expected_dim: int
    status: str
    m0: Optional[int] = None
    mu: Optional[int] = None
    computed_dim: Optional[int] = None
    flags: tuple[str, ...] = ()
    ideal: Optional[LocalIdeal] = None

    @property
    def nonempty(self) -> bool:
        return self.status in (STATUS_ZERO_DIM, STATUS_ICIS)

    @property
    def beta0(self) -> int:
        if self.status == STATUS_ZERO_DIM:
            return self.m0
        if self.status == STATUS_ICIS:
            return 1
        return 0

    @property
    def chi(self) -> int:
        """Euler characteristic of the stratum in a stable perturbation."""
        if self.status == STATUS_ZERO_DIM:
            return self.m0
        if self.status == STATUS_ICIS:
            return 1 + (-1) ** self.expected_dim * self.mu
        return 0


def classify_stratum(ideal: LocalIdeal, k: int, assignment: Assignment, expected: int, ctx: ComputeContext) -> StratumData:
    sb = standard_basis(ideal, ctx.degree_cap, ctx.cache)
    if sb.is_unit:
        return StratumData(k, assignment, expected, STATUS_EMPTY, ideal=ideal)
    if expected == 0:
        q = local_quotient_dimension(ideal, ctx.degree_cap, ctx.cache)
        if q is CAP_EXCEEDED:
            raise CapExceededError("degree cap exceeded classifying a stratum")
        if q is INFINITE:
            return StratumData(
                k, assignment, expected, STATUS_VIOLATION, computed_dim=None,
                flags=("INFINITE_WHERE_FINITE_EXPECTED",), ideal=ideal,
            )
        return StratumData(k, assignment, expected, STATUS_ZERO_DIM, m0=q, computed_dim=0, ideal=ideal)
    krull = quotient_krull_dimension(ideal, ctx.degree_cap, ctx.cache)
    if krull != expected:
        return StratumData(
            k, assignment, expected, STATUS_VIOLATION, computed_dim=krull,
            flags=("DIMENSION_MISMATCH",), ideal=ideal,
        )
    try:
        cert = milnor_icis(ideal, ctx.seed, ctx.degree_cap, ctx.cache)
    except NotIsolatedError:
        return StratumData(
            k, assignment, expected, STATUS_VIOLATION, computed_dim=krull,
            flags=("NOT_ISOLATED",), ideal=ideal,
        )
    for fl in cert.flags:
        ctx.flags.add(fl)
    return StratumData(
        k, assignment, expected, STATUS_ICIS, mu=cert.value,
        computed_dim=krull, flags=tuple(cert.flags), ideal=ideal,
    )


# ---------------------------------------------------------------------------
# The strata table
# ---------------------------------------------------------------------------


@dataclass
class GammaRow:
    k: int
    gamma: PartitionData
    expected_dim: int
    entries: list[tuple[Assignment, int]]  # (assignment, invariant-tuple count)
    negative: bool = False


@dataclass
class StrataTable:
    germ: GermSpec
    n: int
    s: int
    store: dict[tuple[int, Assignment], StratumData]
    rows: list[GammaRow]
    d: int
    explored_levels: tuple[int, ...]
    first_empty_level: Optional[int]
    violations: list[dict]

    def data(self, k: int, assignment: Assignment) -> StratumData:
        got = self.store.get((k, assignment))
        if got is not None:
            return got
        # beyond the explored levels every stratum is empty
        gamma = assignment_gamma(assignment)
        return StratumData(k, assignment, expected_dimension(self.germ, k, gamma.num_cycles), STATUS_EMPTY)

    def full_nonempty(self, multiset: tuple[int, ...]) -> bool:
        k = len(multiset)
        return self.data(k, identity_assignment(multiset)).nonempty

    def level_rows(self, k: int) -> list[GammaRow]:
        return [r for r in self.rows if r.k == k]


def build_strata_table(f: GermSpec, ctx: ComputeContext) -> StrataTable:
    f.validate_normal_form()
    key = f.canonical_key() + f"|cap{ctx.degree_cap}|seed{ctx.seed}"
    if key in ctx.tables:
        return ctx.tables[key]
    n = f.source_dim
    s = len(f.branches)
    store: dict[tuple[int, Assignment], StratumData] = {}
    rows: list[GammaRow] = []
    violations: list[dict] = []
    d = 1
    explored: list[int] = []
    first_empty = None

    for k in range(2, n + 2):
        explored.append(k)
        level_has_points = False
        for gamma in partitions_of(k):
            expected = expected_dimension(f, k, gamma.num_cycles)
            if expected < 0:
                rows.append(GammaRow(k, gamma, expected, [], negative=True))
                continue
            entries: list[tuple[Assignment, int]] = []
            for assignment in enumerate_assignments(gamma, s):
                if (k, assignment) not in store:
                    ideal = stratum_ideal(f, assignment)
                    data = classify_stratum(ideal, k, assignment, expected, ctx)
                    store[(k, assignment)] = data
                    if data.status == STATUS_VIOLATION:
                        violations.append(
                            {
                                "k": k,
                                "gamma": gamma.label(),
                                "assignment": list(assignment),
                                "flags": list(data.flags),
                            }
                        )
                data = store[(k, assignment)]
                entries.append((assignment, assignment_count(assignment)))
                if gamma.is_identity() and data.nonempty:
                    level_has_points = True
            rows.append(GammaRow(k, gamma, expected, entries))
        if level_has_points:
            d = k
        else:
            first_empty = k
            break

    table = StrataTable(f, n, s, store, rows, d, tuple(explored), first_empty, violations)
    ctx.tables[key] = table
    return table


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


@dataclass
class MultiplePointStratum:
    k: int
    branch_tuple: tuple[int, ...]
    gamma: Optional[PartitionData]
    ideal: LocalIdeal
    expected_dim: int
    status: str
    m0: Optional[int] = None
    mu: Optional[int] = None
    computed_dim: Optional[int] = None
    flags: tuple[str, ...] = ()
    germ: Optional[GermSpec] = None

    @classmethod
    def from_data(cls, data: StratumData, branch_tuple, gamma, germ=None):
        return cls(
            k=data.k,
            branch_tuple=tuple(branch_tuple),
            gamma=gamma,
            ideal=data.ideal,
            expected_dim=data.expected_dim,
            status=data.status,
            m0=data.m0,
            mu=data.mu,
            computed_dim=data.computed_dim,
            flags=data.flags,
            germ=germ,
        )


def multiple_point_ideal(
    f: GermSpec, k: int, branch_tuple: Sequence[int], ctx: Optional[ComputeContext] = None
) -> MultiplePointStratum:
    """The full k-th multiple point stratum for the given branch tuple."""
    ctx = ctx or ComputeContext()
    if k < 2:
        raise InputError("multiple point spaces start at k = 2")
    if any(b < 0 or b >= len(f.branches) for b in branch_tuple) or len(branch_tuple) != k:
        raise InputError("invalid branch tuple")
    assignment = identity_assignment(branch_tuple)
    ideal = stratum_ideal(f, assignment)
    expected = expected_dimension(f, k, k)
    if expected < 0:
        data = StratumData(k, assignment, expected, STATUS_NEGATIVE_DIM, ideal=ideal)
    else:
        data = classify_stratum(ideal, k, assignment, expected, ctx)
    return MultiplePointStratum.from_data(data, branch_tuple, None, germ=f)


def fixed_point_stratum(
    stratum: MultiplePointStratum,
    gamma: PartitionData,
    ctx: Optional[ComputeContext] = None,
) -> MultiplePointStratum:
    """Identify coordinates along the cycles of a permutation of the given type."""
    ctx = ctx or ComputeContext()
    if stratum.gamma is not None:
        raise InputError("fixed-point strata are carved out of a full stratum")
    if stratum.germ is None:
        raise InputError("stratum does not carry its germ")
    k = stratum.k
    if gamma.k != k:
        raise InputError("cycle type size does not match the stratum")
    f = stratum.germ
    candidates = [
        a
        for a in enumerate_assignments(gamma, len(f.branches))
        if assignment_multiset(a) == tuple(sorted(stratum.branch_tuple))
    ]
    if not candidates:
        raise InputError("cycle type is incompatible with the branch tuple")
    if len(candidates) > 1:
        raise InputError(
            "cycle placement is ambiguous for this mixed branch tuple; use the strata table"
        )
    assignment = candidates[0]
    ideal = stratum_ideal(f, assignment)
    expected = expected_dimension(f, k, gamma.num_cycles)
    if expected < 0:
        data = StratumData(k, assignment, expected, STATUS_NEGATIVE_DIM, ideal=ideal)
    else:
        data = classify_stratum(ideal, k, assignment, expected, ctx)
    return MultiplePointStratum.from_data(data, stratum.branch_tuple, gamma, germ=f)


@dataclass
class StructureReport:
    name: str
    n: int
    s: int
    d: int
    ok: bool
    rows: list[dict]
    violations: list[dict]
    first_empty_level: Optional[int]

    def as_json(self) -> dict:
        return {
            "name": self.name,
            "source_dim": self.n,
            "branch_count": self.s,
            "d": self.d,
            "s": self.s,
            "a_finite_at_desk_scale": self.ok,
            "first_empty_level": self.first_empty_level,
            "strata": self.rows,
            "violations": self.violations,
        }


def verify_multiple_point_structure(f: GermSpec, ctx: Optional[ComputeContext] = None) -> StructureReport:
    """Check every stratum against its predicted dimension and ICIS status."""
    ctx = ctx or ComputeContext()
    table = build_strata_table(f, ctx)
    rows = []
    for row in table.rows:
        if row.negative:
            rows.append(
                {
                    "k": row.k,
                    "gamma": row.gamma.label(),
                    "expected_dim": row.expected_dim,
                    "status": STATUS_NEGATIVE_DIM,
                    "entries": [],
                }
            )
            continue
        entries = []
        for assignment, count in row.entries:
            data = table.data(row.k, assignment)
            entries.append(
                {
                    "assignment": [list(c) for c in assignment],
                    "count": count,
                    "status": data.status,
                    "m0": data.m0,
                    "mu": data.mu,
                    "computed_dim": data.computed_dim,
                    "flags": list(data.flags),
                }
            )
        rows.append(
            {
                "k": row.k,
                "gamma": row.gamma.label(),
                "expected_dim": row.expected_dim,
                "status": None,
                "entries": entries,
            }
        )
    return StructureReport(
        name=f.name,
        n=f.source_dim,
        s=len(f.branches),
        d=table.d,
        ok=not table.violations,
        rows=rows,
        violations=list(table.violations),
        first_empty_level=table.first_empty_level,
    )


# ---------------------------------------------------------------------------
# The double point pair
# ---------------------------------------------------------------------------


@dataclass
class PairChart:
    """The part of the double point space projecting into one branch chart."""

    branch: int
    x_tuples: list[tuple[tuple[int, int], StratumData]]  # ((i, j), data)
    s: int
    mu_X: int


@dataclass
class DoublePointPair:
    germ: GermSpec
    table: StrataTable
    charts: list[PairChart]
    iteration_table: dict

    @property
    def double_point_ideal(self) -> Optional[LocalIdeal]:
        data = self.table.store.get((2, identity_assignment((0, 0))))
        return data.ideal if data is not None else None


def double_point_projection(f: GermSpec, ctx: Optional[ComputeContext] = None) -> DoublePointPair:
    """Package the projection of the double point space back to the source.

    Multiple point data of the projection is read off the higher multiple
    point data of the germ (the symmetric group acting one size down embeds
    as the subgroup fixing the first entry).
    """
    ctx = ctx or ComputeContext()
    table = build_strata_table(f, ctx)
    charts = _pair_charts(table)
    if not charts:
        raise EmptyDoublePointsError("the double point space is empty")
    iteration = {}
    n = f.source_dim
    for k in range(2, n + 1):
        for gamma in partitions_of(k):
            iteration[(k, gamma.label())] = {
                "source_level": k + 1,
                "gamma": gamma.with_extra_fixed_point().label(),
            }
    return DoublePointPair(f, table, charts, iteration)


def all_negative_strata_scheme_empty(
    table: StrataTable, ctx: ComputeContext, k_limit: int = 40
) -> bool:
    """True when every stratum whose expected dimension is negative is empty
    as a scheme germ.  Levels are explored until a fully empty one; for a
    finite germ the divided differences produce a unit at bounded depth."""
    f = table.germ
    s = table.s
    k = 2
    while k <= k_limit:
        level_empty = True
        for gamma in partitions_of(k):
            expected = expected_dimension(f, k, gamma.num_cycles)
            for assignment in enumerate_assignments(gamma, s):
                known = table.store.get((k, assignment))
                if known is not None:
                    empty = known.status == STATUS_EMPTY
                else:
                    sb = standard_basis(stratum_ideal(f, assignment), ctx.degree_cap, ctx.cache)
                    empty = sb.is_unit
                if expected < 0 and not empty:
                    return False
                if gamma.is_identity() and not empty:
                    level_empty = False
        if level_empty:
            return True
        k += 1
    ctx.flags.add("STABILITY_SCAN_TRUNCATED")
    return False


def _pair_charts(table: StrataTable) -> list[PairChart]:
    charts = []
    s = table.s
    for i in range(s):
        x_tuples = []
        mu_X = 0
        for j in range(s):
            data = table.data(2, identity_assignment((i, j)))
            if not data.nonempty:
                continue
            x_tuples.append(((i, j), data))
            if data.status == STATUS_ICIS:
                mu_X += data.mu
            else:
                mu_X += data.m0 - 1
        if x_tuples:
            charts.append(PairChart(i, x_tuples, len(x_tuples), mu_X))
    return charts
