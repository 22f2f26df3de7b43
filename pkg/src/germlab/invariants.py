"""Invariant engines on top of the strata tables.

Everything reduces to Euler-characteristic bookkeeping over the cycle-type
strata of a stable perturbation: the image Milnor number solves the weighted
Euler-characteristic identity for the image, the double point Milnor number
is the image Milnor number of the double-point projection (computed chart by
chart through the iteration of multiple point data one level up), and the
alternating Milnor numbers come from equivariant Euler characteristics
corrected by the zero-homology isotypes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Optional

from .context import ComputeContext
from .errors import (
    CheckFailedError,
    HoustonSumViolationError,
    NonIntegerOrbitCountError,
    NonIntegerResultError,
    StructureViolationError,
)
from .local import germ_multiplicity
from .multipoint import (
    Assignment,
    DoublePointPair,
    GermSpec,
    STATUS_EMPTY,
    STATUS_ICIS,
    STATUS_ZERO_DIM,
    StrataTable,
    StratumData,
    _sort_assignment,
    assignment_count,
    assignment_multiset,
    build_strata_table,
    enumerate_assignments,
    expected_dimension,
    identity_assignment,
    _pair_charts,
)
from .symrep import (
    ALTERNATING,
    PartitionData,
    isotype_rank_points,
    marar_coefficient,
    partitions_of,
    comparativan_comparison,
)


def _require_clean(table: StrataTable) -> None:
    if table.violations:
        raise StructureViolationError(
            "multiple point structure violates its dimension predictions",
            violations=table.violations,
        )


# ---------------------------------------------------------------------------
# Views: a single connected-target bookkeeping unit.  A germ is one view; the
# double point projection is one view per branch chart of the source.
# ---------------------------------------------------------------------------


@dataclass
class StrataView:
    label: str
    n: int  # source dimension of the mapping carried by the view
    s: int  # number of base points
    mu_X: int  # Milnor term of the source space
    d: int  # maximal multiplicity with points in the stable fiber
    levels: dict[int, list[tuple[PartitionData, Assignment, int, StratumData]]]
    component_counts: dict[int, dict[PartitionData, int]]

    @property
    def top_term(self) -> int:
        return comb(self.s - 1, self.d) if self.s > self.d else 0


def germ_view(table: StrataTable) -> StrataView:
    f = table.germ
    n = table.n
    levels: dict[int, list] = {}
    components: dict[int, dict[PartitionData, int]] = {}
    for k in table.explored_levels:
        rows = []
        comp_counts: dict[PartitionData, int] = {}
        for row in table.level_rows(k):
            if not row.negative:
                for assignment, count in row.entries:
                    data = table.data(k, assignment)
                    rows.append((row.gamma, assignment, count, data))
            # Invariant tuples of this cycle type that carry points of the
            # unfolding: independent of the stratum's own dimension cut.
            fixed = 0
            for assignment in enumerate_assignments(row.gamma, table.s):
                if table.full_nonempty(assignment_multiset(assignment)):
                    fixed += assignment_count(assignment)
            comp_counts[row.gamma] = fixed
        levels[k] = rows
        components[k] = comp_counts
    return StrataView(
        label=f.name or "germ",
        n=n,
        s=table.s,
        mu_X=0,
        d=table.d,
        levels=levels,
        component_counts=components,
    )


def pair_views(table: StrataTable) -> list[StrataView]:
    """One view per source chart of the double-point projection.

    Multiple point data of the projection at multiplicity k is the table
    data at k+1 with an extra fixed point pinned to the chart branch; the
    symmetric group acts as the subgroup fixing the first entry.
    """
    f = table.germ
    n_pair = table.n - 1
    views = []
    for chart in _pair_charts(table):
        i = chart.branch
        levels: dict[int, list] = {}
        components: dict[int, dict[PartitionData, int]] = {}
        d = 1
        for k in range(2, n_pair + 2):
            rows = []
            comp_counts: dict[PartitionData, int] = {}
            seen_points = False
            for gamma in partitions_of(k):
                expected = (n_pair + 1) - 2 * k + gamma.num_cycles
                fixed = 0
                if expected >= 0:
                    for assignment in enumerate_assignments(gamma, table.s):
                        lifted = _sort_assignment(assignment + ((1, i),))
                        data = table.data(k + 1, lifted)
                        count = assignment_count(assignment)
                        rows.append((gamma, assignment, count, data))
                        if gamma.is_identity() and data.nonempty:
                            seen_points = True
                # component fixed counts ignore the dimension cut: a tuple of
                # source points is present whenever its full stratum is.
                for assignment in enumerate_assignments(gamma, table.s):
                    lifted_full = (i,) + assignment_multiset(assignment)
                    if table.full_nonempty(tuple(sorted(lifted_full))):
                        fixed += assignment_count(assignment)
                comp_counts[gamma] = fixed
            levels[k] = rows
            components[k] = comp_counts
            if seen_points:
                d = k
        views.append(
            StrataView(
                label=f"{f.name or 'germ'}|chart{i}",
                n=n_pair,
                s=chart.s,
                mu_X=chart.mu_X,
                d=d,
                levels=levels,
                component_counts=components,
            )
        )
    return views


# ---------------------------------------------------------------------------
# Image Milnor number and alternating decomposition of a view
# ---------------------------------------------------------------------------


def _image_milnor_of_view(view: StrataView) -> int:
    sign = -1 if view.n % 2 else 1
    acc = Fraction(view.s - 1)
    for k, rows in view.levels.items():
        for gamma, _assignment, count, data in rows:
            if data.chi:
                acc += marar_coefficient(gamma) * count * data.chi
    value = sign * acc + view.mu_X
    if value.denominator != 1 or value < 0:
        raise NonIntegerResultError(
            f"image Milnor number of {view.label} evaluated to {value}",
            view=view.label,
        )
    return int(value)


def _alternating_of_view(view: StrataView) -> list[int]:
    out = [view.mu_X]
    for k in range(2, view.d + 1):
        dim_k = view.n + 1 - k
        rows = view.levels.get(k, [])
        chi_by_gamma: dict[PartitionData, int] = {g: 0 for g in partitions_of(k)}
        for gamma, _assignment, count, data in rows:
            chi_by_gamma[gamma] += count * data.chi
        comp_counts = view.component_counts.get(k, {g: 0 for g in partitions_of(k)})
        h0_alt = isotype_rank_points(comp_counts, k, ALTERNATING)
        if dim_k == 0:
            points_alt = isotype_rank_points(chi_by_gamma, k, ALTERNATING)
            mu_k = points_alt - h0_alt
        else:
            chi_alt = Fraction(0)
            for gamma in partitions_of(k):
                chi_alt += gamma.class_size * gamma.sign * chi_by_gamma[gamma]
            chi_alt /= factorial(k)
            mu_k = (-1) ** dim_k * (chi_alt - h0_alt)
        if isinstance(mu_k, Fraction):
            if mu_k.denominator != 1:
                raise NonIntegerResultError(
                    f"alternating Milnor number at level {k} evaluated to {mu_k}",
                    view=view.label,
                )
            mu_k = int(mu_k)
        if mu_k < 0:
            raise NonIntegerResultError(
                f"alternating Milnor number at level {k} is negative ({mu_k})",
                view=view.label,
            )
        out.append(mu_k)
    out.append(view.top_term)
    return out


def _checked_view_invariants(view: StrataView) -> tuple[int, list[int]]:
    mu = _image_milnor_of_view(view)
    alt = _alternating_of_view(view)
    if sum(alt) != mu:
        raise HoustonSumViolationError(
            f"alternating Milnor numbers {alt} do not sum to the image Milnor number {mu}",
            view=view.label,
        )
    return mu, alt


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


@dataclass
class EquivariantRow:
    k: int
    gamma: PartitionData
    expected_dim: int
    a_gamma: Fraction
    entries: list[dict]
    negative: bool


@dataclass
class EquivariantTable:
    germ: GermSpec
    d: int
    s: int
    rows: list[EquivariantRow]
    flags: tuple[str, ...]

    def as_json(self) -> list[dict]:
        out = []
        for row in self.rows:
            out.append(
                {
                    "k": row.k,
                    "gamma": row.gamma.label(),
                    "expected_dim": row.expected_dim,
                    "a_gamma": str(row.a_gamma),
                    "status": "NEGATIVE_DIM" if row.negative else None,
                    "entries": row.entries,
                }
            )
        return out


def equivariant_euler_data(f: GermSpec, ctx: Optional[ComputeContext] = None) -> EquivariantTable:
    """The full cycle-type stratum table decorated with the formula weights."""
    ctx = ctx or ComputeContext()
    table = build_strata_table(f, ctx)
    _require_clean(table)
    rows = []
    for row in table.rows:
        entries = []
        if not row.negative:
            for assignment, count in row.entries:
                data = table.data(row.k, assignment)
                entries.append(
                    {
                        "assignment": [list(c) for c in assignment],
                        "count": count,
                        "status": data.status,
                        "m0": data.m0,
                        "mu": data.mu,
                        "beta0": data.beta0 if data.nonempty else None,
                        "chi": data.chi,
                        "flags": list(data.flags),
                    }
                )
        rows.append(
            EquivariantRow(
                k=row.k,
                gamma=row.gamma,
                expected_dim=row.expected_dim,
                a_gamma=marar_coefficient(row.gamma),
                entries=entries,
                negative=row.negative,
            )
        )
    return EquivariantTable(f, table.d, table.s, rows, tuple(sorted(ctx.flags)))


def image_milnor_number(
    subject, ctx: Optional[ComputeContext] = None
) -> int:
    """Image Milnor number of a germ, or of a double-point projection pair."""
    ctx = ctx or ComputeContext()
    if isinstance(subject, DoublePointPair):
        _require_clean(subject.table)
        return sum(_checked_view_invariants(v)[0] for v in pair_views(subject.table))
    table = build_strata_table(subject, ctx)
    _require_clean(table)
    return _checked_view_invariants(germ_view(table))[0]


def double_point_milnor(f: GermSpec, ctx: Optional[ComputeContext] = None) -> int:
    """Middle Betti number of the double point set of a stable perturbation,
    computed as the image Milnor number of the double-point projection."""
    ctx = ctx or ComputeContext()
    table = build_strata_table(f, ctx)
    _require_clean(table)
    views = pair_views(table)
    if not views:
        return 0
    return sum(_checked_view_invariants(v)[0] for v in views)


def alternating_milnor_numbers(f: GermSpec, ctx: Optional[ComputeContext] = None) -> list[int]:
    """The alternating decomposition (one entry per multiplicity level,
    plus the combinatorial top term).  The entries sum to the image Milnor
    number; a failed sum is a hard error."""
    ctx = ctx or ComputeContext()
    table = build_strata_table(f, ctx)
    _require_clean(table)
    return _checked_view_invariants(germ_view(table))[1]


def zero_stable_counts(f: GermSpec, ctx: Optional[ComputeContext] = None) -> dict:
    """Counts of zero-dimensional stable singularities in a stable fiber."""
    ctx = ctx or ComputeContext()
    table = build_strata_table(f, ctx)
    _require_clean(table)
    n = table.n
    if n not in (2, 3):
        raise CheckFailedError("zero-stable counts are defined for source dimension 2 or 3")
    out: dict[str, int] = {}

    def total_m0(k: int, gamma: PartitionData) -> int:
        acc = 0
        for row in table.level_rows(k):
            if row.gamma != gamma or row.negative:
                continue
            for assignment, count in row.entries:
                data = table.data(k, assignment)
                if data.status == STATUS_ZERO_DIM:
                    acc += count * data.m0
        return acc

    if n == 2:
        out["C"] = total_m0(2, PartitionData(2, (2,)))
        triple = total_m0(3, PartitionData(3, (1, 1, 1)))
        if triple % 6:
            raise NonIntegerOrbitCountError(f"triple point count {triple} is not divisible by 6")
        out["T"] = triple // 6
    else:
        quad = total_m0(4, PartitionData(4, (1, 1, 1, 1)))
        if quad % 24:
            raise NonIntegerOrbitCountError(f"quadruple point count {quad} is not divisible by 24")
        out["Q"] = quad // 24
    return out


def _total_mu(table: StrataTable, k: int) -> int:
    """Sum of Milnor numbers over the nonempty full strata at level k."""
    acc = 0
    for row in table.level_rows(k):
        if row.negative or not row.gamma.is_identity():
            continue
        for assignment, count in row.entries:
            data = table.data(k, assignment)
            if data.status == STATUS_ICIS:
                acc += count * data.mu
            elif data.status == STATUS_ZERO_DIM:
                acc += count * (data.m0 - 1)
    return acc


def is_stable_by_strata(f: GermSpec, ctx: Optional[ComputeContext] = None) -> bool:
    """Stability read off the strata: every nonempty stratum is smooth of its
    expected dimension, every zero-dimensional stratum is reduced, and every
    stratum with negative expected dimension is empty as a scheme."""
    ctx = ctx or ComputeContext()
    table = build_strata_table(f, ctx)
    _require_clean(table)
    for (k, assignment), data in table.store.items():
        if data.status == STATUS_ICIS and data.mu != 0:
            return False
        if data.status == STATUS_ZERO_DIM and data.m0 != 1:
            return False
    from .multipoint import all_negative_strata_scheme_empty

    return all_negative_strata_scheme_empty(table, ctx)


def special_formula_checks(f: GermSpec, ctx: Optional[ComputeContext] = None) -> dict:
    """The closed-form identities available in low source dimensions, plus
    the order relations between the two Milnor numbers."""
    ctx = ctx or ComputeContext()
    table = build_strata_table(f, ctx)
    _require_clean(table)
    n = table.n
    mu_I, alt = _checked_view_invariants(germ_view(table))
    mu_D = double_point_milnor(f, ctx)
    checks: dict[str, dict] = {}
    failures: list[str] = []

    def record(name: str, passed: bool, **values):
        checks[name] = {"pass": bool(passed), **values}
        if not passed:
            failures.append(name)

    record("mu_I_le_mu_D", mu_I <= mu_D, mu_I=mu_I, mu_D=mu_D)

    stable = is_stable_by_strata(f, ctx)
    equiv = (mu_I == 0) == (mu_D == 0) == stable
    record("stability_equivalence", equiv, mu_I=mu_I, mu_D=mu_D, stable=stable)

    if n == 2 and table.s == 1:
        counts = zero_stable_counts(f, ctx)
        mu_d2 = _total_mu(table, 2)
        record(
            "triple_point_formula",
            mu_D == mu_d2 + 3 * counts["T"],
            mu_D=mu_D,
            mu_D2=mu_d2,
            T=counts["T"],
        )
    if n == 3 and table.s == 1:
        counts = zero_stable_counts(f, ctx)
        mu_d2 = _total_mu(table, 2)
        mu_d3 = _total_mu(table, 3)
        mu3_alt = alt[2] if len(alt) > 2 else 0
        mu3_trivial = mu_d3 + mu3_alt - 2 * (mu_D - 4 * counts["Q"] - mu_d2)
        record(
            "quadruple_point_back_solve",
            mu3_trivial >= 0,
            mu_D=mu_D,
            mu_D2=mu_d2,
            mu_D3=mu_d3,
            mu3_alt=mu3_alt,
            Q=counts["Q"],
            mu3_trivial_isotype=mu3_trivial,
        )

    if failures:
        raise CheckFailedError(
            "identity checks failed: " + ", ".join(failures), checks=checks
        )
    return checks


def build_invariant_report(f: GermSpec, ctx: Optional[ComputeContext] = None) -> dict:
    """The full structured record: strata, invariants, sequences, checks."""
    from . import equising  # local import; equising depends on this module

    ctx = ctx or ComputeContext()
    table = build_strata_table(f, ctx)
    _require_clean(table)
    eq_table = equivariant_euler_data(f, ctx)
    report: dict = {
        "name": f.name,
        "source_dim": f.source_dim,
        "branch_count": len(f.branches),
        "seed": ctx.seed,
        "max_degree": ctx.degree_cap,
        "s": table.s,
        "d": table.d,
    }
    consistency = "CONSISTENT"
    failure = None
    try:
        mu_I, alt = _checked_view_invariants(germ_view(table))
        mu_D = double_point_milnor(f, ctx)
        report["mu_I"] = mu_I
        report["mu_D"] = mu_D
        report["mu_alt"] = alt
        if table.n in (2, 3):
            report["zero_stable"] = zero_stable_counts(f, ctx)
        seqs = equising.mu_star_sequences(f, ctx)
        report["mu_I_star"] = seqs["mu_I_star"]
        report["mu_tilde_I_star_pair"] = seqs["mu_tilde_I_star_pair"]
        report["slice_certificates"] = seqs["chain"].certificates
        report["le_greuel"] = le_greuel_report(f, ctx)
        report["checks"] = special_formula_checks(f, ctx)
        report["stable"] = is_stable_by_strata(f, ctx)
    except (CheckFailedError, HoustonSumViolationError, NonIntegerResultError) as exc:
        consistency = "INCONSISTENT"
        failure = exc.as_json()
    report["strata"] = eq_table.as_json()
    report["comparativan"] = {
        "reference": comparativan_comparison(4, 2),
        "at_germ": comparativan_comparison(table.s, table.d)
        if table.s > table.d >= 1
        else None,
    }
    report["consistency"] = consistency
    if failure is not None:
        report["failure"] = failure
    report["genericity"] = {
        "certified": not any("GENERICITY" in fl for fl in ctx.flags),
        "flags": sorted(ctx.flags),
    }
    return report


def le_greuel_report(f: GermSpec, ctx: Optional[ComputeContext] = None) -> dict:
    """Both sides of the slicing identity for the image Milnor number.

    For surface and higher sources this pairs the germ with its transverse
    slice; a curve germ pairs with its local multiplicity instead.
    """
    from . import equising  # local import; equising depends on this module

    ctx = ctx or ComputeContext()
    mu = image_milnor_number(f, ctx)
    if f.source_dim >= 2:
        sliced, cert = equising.certified_slice(f, ctx)
        mu_slice = cert["mu_I"]
        rhs = mu + mu_slice
        report = {
            "mu_I": mu,
            "mu_I_slice": mu_slice,
            "critical_points_on_strata": rhs,
            "slice_certificate": cert,
        }
    else:
        # multiplicity of a multi-germ: local multiplicities add up
        m0 = sum(
            germ_multiplicity(list(b.components), ctx.degree_cap, ctx.cache)
            for b in f.branches
        )
        rhs = mu + m0 - 1
        report = {
            "mu_I": mu,
            "multiplicity": m0,
            "critical_points_on_strata": rhs,
        }
    if rhs < 0:
        raise NonIntegerResultError(f"critical point count {rhs} is negative")
    return report
