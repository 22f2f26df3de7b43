"""Transverse slicing and Whitney equisingularity verdicts.

A slice restricts the germ over a generic hyperplane through the target
origin.  Solving the pulled-back linear form for the first source coordinate
(possible because the coefficient is generically a unit) renormalizes the
slice into corank-one form one dimension down.  Slicing repeatedly yields
the sequence of image Milnor numbers that, together with the corresponding
sequence for the double-point projection, decides Whitney equisingularity
of one-parameter families.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .context import ComputeContext
from .errors import (
    DegenerateFormError,
    InputError,
    StructureViolationError,
    UnstableGenericMemberError,
)
from .invariants import double_point_milnor, image_milnor_number, _total_mu
from .local import GENERIC_COEFF_BOUND
from .multipoint import Branch, GermSpec, build_strata_table
from .poly import Poly, substitute

_SLICE_RESAMPLE_LIMIT = 12
_REFINE_STEP = 4
_REFINE_LIMIT = 4


def _solve_for_x1(pf: Poly, variables: tuple[str, ...], truncation: int) -> Poly:
    """Power-series solution of pf = 0 for x1, truncated by total degree.

    Requires a unit coefficient on the linear x1 term.  The remainder feeds
    back through higher-order terms only, so each pass fixes one more order.
    """
    x1 = "x1"
    lin = pf.diff(x1).constant_term()
    if lin == 0:
        raise DegenerateFormError("linear form is degenerate for x1")
    rest_vars = tuple(v for v in variables if v != x1)
    remainder = pf - Poly.variable(variables, x1) * lin
    phi = Poly.zero(rest_vars)
    for _ in range(truncation + 2):
        image = substitute(remainder, {x1: phi}, result_variables=rest_vars)
        new_phi = (image * Fraction(-1, 1) * Fraction(1, lin)).truncate(truncation)
        if new_phi == phi:
            break
        phi = new_phi
    return phi


def _slice_with_form(
    f: GermSpec, coeffs: list[int], truncation: int
) -> GermSpec:
    n = f.source_dim
    vs = f.source_variables
    new_source = tuple(f"x{i}" for i in range(1, n - 1)) + ("y",)
    rename = {f"x{i}": Poly.variable(new_source, f"x{i - 1}") for i in range(2, n)}
    branches = []
    for b in f.branches:
        pf = Poly.zero(vs)
        for c, comp in zip(coeffs, b.components):
            if c:
                pf = pf + comp * c
        phi = _solve_for_x1(pf, vs, truncation)
        phi_in_vs = phi.embedded(vs)
        comps = []
        for comp in b.components[n - 1 :]:
            g = substitute(comp, {"x1": phi_in_vs}, result_variables=vs)
            g = g.truncate(truncation)
            g = substitute(g, rename, result_variables=new_source)
            comps.append(g)
        head = tuple(Poly.variable(new_source, f"x{i}") for i in range(1, n - 1))
        branches.append(Branch(b.label, head + tuple(comps)))
    return GermSpec(n - 1, tuple(branches), (), f"{f.name}~slice")


def transverse_slice(
    f: GermSpec, seed: int, ctx: Optional[ComputeContext] = None, stream: int = 0,
    truncation: Optional[int] = None,
) -> GermSpec:
    """Slice over a random hyperplane; resamples degenerate draws."""
    ctx = ctx or ComputeContext()
    if f.params:
        raise InputError("specialize the parameter before slicing")
    if f.source_dim < 2:
        raise InputError("transverse slices need source dimension at least 2")
    truncation = truncation or ctx.slice_truncation
    rng = random.Random(f"slice:{seed}:{stream}:{f.canonical_key()}")
    for _ in range(_SLICE_RESAMPLE_LIMIT):
        coeffs = [rng.randint(-GENERIC_COEFF_BOUND, GENERIC_COEFF_BOUND) for _ in range(f.source_dim + 1)]
        if not any(coeffs):
            continue
        try:
            return _slice_with_form(f, coeffs, truncation)
        except DegenerateFormError:
            continue
    raise DegenerateFormError("no usable linear form found while slicing", germ=f.name)


def certified_slice(f: GermSpec, ctx: ComputeContext) -> tuple[GermSpec, dict]:
    """A slice plus its genericity and truncation certificate.

    The slice invariant is accepted when an independently drawn form yields
    the same value; otherwise extra draws are taken and the minimum kept
    (upper semicontinuity makes the generic value the minimum), flagged.
    The truncation order is raised until the invariant stops moving.
    """

    def mu_at(stream: int, truncation: int) -> tuple[GermSpec, Optional[int]]:
        # An insufficient truncation can make the slice look non-finite;
        # treat that as "needs refinement" rather than failing outright.
        sliced = transverse_slice(f, ctx.seed, ctx, stream=stream, truncation=truncation)
        try:
            return sliced, image_milnor_number(sliced, ctx)
        except StructureViolationError:
            return sliced, None

    def refined(stream: int) -> Optional[tuple[GermSpec, int, int, bool]]:
        # None means the drawn form never produced a finite slice: either the
        # hyperplane was degenerate for this germ or the germ itself is bad.
        truncation = ctx.slice_truncation
        sliced, mu = mu_at(stream, truncation)
        was_refined = False
        for _ in range(_REFINE_LIMIT):
            sliced2, mu2 = mu_at(stream, truncation + _REFINE_STEP)
            if mu is not None and mu2 == mu:
                break
            was_refined = True
            truncation += _REFINE_STEP
            sliced, mu = sliced2, mu2
        else:
            if mu is not None:
                ctx.flags.add("SLICE_TRUNCATION_UNSTABLE")
        if mu is None:
            return None
        if was_refined:
            ctx.flags.add("SLICE_REFINED")
        return sliced, mu, truncation, was_refined

    successes: list[tuple[GermSpec, int, int, bool]] = []
    stream = 0
    degenerate = 0
    while len(successes) < 2 and stream < _SLICE_RESAMPLE_LIMIT:
        got = refined(stream)
        stream += 1
        if got is None:
            degenerate += 1
            ctx.flags.add("DEGENERATE_FORM_RESAMPLED")
            continue
        successes.append(got)
    if len(successes) < 2:
        raise StructureViolationError(
            "no linear form produced a finite transverse slice",
            germ=f.name,
            degenerate_draws=degenerate,
        )
    (slice_a, mu_a, trunc_a, refined_a), (slice_b, mu_b, trunc_b, _) = successes
    samples = [mu_a, mu_b]
    agreed = mu_a == mu_b
    chosen, chosen_mu, trunc = slice_a, mu_a, trunc_a
    if not agreed:
        ctx.flags.add("GENERICITY_DISAGREEMENT")
        extras = 0
        while extras < 2 and stream < _SLICE_RESAMPLE_LIMIT:
            got = refined(stream)
            stream += 1
            if got is None:
                continue
            extras += 1
            s_extra, mu_extra, trunc_extra, _ = got
            samples.append(mu_extra)
            if mu_extra < chosen_mu:
                chosen, chosen_mu, trunc = s_extra, mu_extra, trunc_extra
        if mu_b < chosen_mu:
            chosen, chosen_mu, trunc = slice_b, mu_b, trunc_b
    cert = {
        "mu_I": chosen_mu,
        "agreed": agreed,
        "samples": samples,
        "truncation": trunc,
        "refined": refined_a,
    }
    return chosen, cert


@dataclass
class SliceChain:
    """The germ together with its successive certified transverse slices."""

    germs: list[GermSpec]
    certificates: list[dict]


def slice_chain(f: GermSpec, ctx: Optional[ComputeContext] = None) -> SliceChain:
    ctx = ctx or ComputeContext()
    germs = [f]
    certs: list[dict] = []
    for _level in range(1, f.source_dim):
        sliced, cert = certified_slice(germs[-1], ctx)
        germs.append(sliced)
        certs.append(cert)
    return SliceChain(germs, certs)


def mu_star_sequences(f: GermSpec, ctx: Optional[ComputeContext] = None) -> dict:
    """The image Milnor numbers down the slice chain, and the corresponding
    sequence for the double-point projection with its first entry dropped."""
    ctx = ctx or ComputeContext()
    chain = slice_chain(f, ctx)
    mu_star = [image_milnor_number(chain.germs[0], ctx)]
    mu_star += [cert["mu_I"] for cert in chain.certificates]
    mu_tilde = [double_point_milnor(chain.germs[i], ctx) for i in range(1, f.source_dim - 1)]
    return {
        "mu_I_star": mu_star,
        "mu_tilde_I_star_pair": mu_tilde,
        "chain": chain,
    }


@dataclass
class FamilyVerdict:
    verdict: str
    members: list[dict]
    t_samples: list[str]
    seed: int
    jumping_entries: list[dict]
    flags: list[str]

    def as_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "seed": self.seed,
            "t_samples": self.t_samples,
            "members": self.members,
            "jumping_entries": self.jumping_entries,
            "flags": self.flags,
            "note": "constancy is tested at finitely many sampled parameters; "
            "the verdict certifies that no jump was detected there",
        }


VERDICT_EQUISINGULAR = "WHITNEY_EQUISINGULAR"
VERDICT_TARGET_ONLY = "TARGET_ONLY"
VERDICT_NOT = "NOT_EQUISINGULAR"


def _draw_parameters(family: GermSpec, count: int, seed: int) -> list[Fraction]:
    rng = random.Random(f"family:{seed}:{family.canonical_key()}")
    out: list[Fraction] = []
    while len(out) < count:
        a = rng.randint(1, GENERIC_COEFF_BOUND) * rng.choice((1, -1))
        b = rng.randint(1, 8)
        t = Fraction(a, b)
        if t != 0 and t not in out:
            out.append(t)
    return out


def whitney_verdict(
    family: GermSpec, t_samples: int = 2, ctx: Optional[ComputeContext] = None
) -> FamilyVerdict:
    """Decide Whitney equisingularity of a one-parameter family by comparing
    the slice sequences at t = 0 against random parameter samples."""
    ctx = ctx or ComputeContext()
    if len(family.params) != 1:
        raise InputError("a family needs exactly one parameter")
    ts = [Fraction(0)] + _draw_parameters(family, t_samples, ctx.seed)
    members = []
    for t in ts:
        germ = family.specialize(t)
        germ = GermSpec(germ.source_dim, germ.branches, (), f"{family.name}@t={t}")
        try:
            table = build_strata_table(germ, ctx)
            if table.violations:
                raise StructureViolationError(
                    "strata violate their dimension predictions",
                    violations=table.violations,
                )
            member_flags = set()
            before = set(ctx.flags)
            seqs = mu_star_sequences(germ, ctx)
            member_flags |= ctx.flags - before
            members.append(
                {
                    "t": str(t),
                    "mu_I_star": seqs["mu_I_star"],
                    "mu_tilde_I_star_pair": seqs["mu_tilde_I_star_pair"],
                    "mu_D2": _total_mu(table, 2),
                    "flags": sorted(member_flags),
                }
            )
        except StructureViolationError as exc:
            if t == 0:
                raise
            raise UnstableGenericMemberError(
                f"family member at t = {t} fails the finiteness checks",
                t=str(t),
                cause=exc.as_json(),
            )
    base = members[0]
    jumping = []
    star_constant = True
    tilde_constant = True
    for member in members[1:]:
        for idx, (v0, vt) in enumerate(zip(base["mu_I_star"], member["mu_I_star"])):
            if v0 != vt:
                star_constant = False
                jumping.append(
                    {"sequence": "mu_I_star", "level": idx, "t": member["t"], "value_at_0": v0, "value_at_t": vt}
                )
        for idx, (v0, vt) in enumerate(
            zip(base["mu_tilde_I_star_pair"], member["mu_tilde_I_star_pair"])
        ):
            if v0 != vt:
                tilde_constant = False
                jumping.append(
                    {
                        "sequence": "mu_tilde_I_star_pair",
                        "level": idx + 1,
                        "t": member["t"],
                        "value_at_0": v0,
                        "value_at_t": vt,
                    }
                )
    if star_constant and tilde_constant:
        verdict = VERDICT_EQUISINGULAR
    elif star_constant:
        verdict = VERDICT_TARGET_ONLY
    else:
        verdict = VERDICT_NOT
    return FamilyVerdict(
        verdict=verdict,
        members=members,
        t_samples=[str(t) for t in ts[1:]],
        seed=ctx.seed,
        jumping_entries=jumping,
        flags=sorted(ctx.flags),
    )
