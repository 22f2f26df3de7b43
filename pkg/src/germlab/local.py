"""Standard bases in local rings and the invariants built on them.

The monomial order is negative-degree reverse lexicographic, so a polynomial
with a nonzero constant term is a unit.  Normal forms use Mora's reduction
with ecart-minimal selection, which terminates for polynomial input under
this order.  Quotient dimensions are counted from the staircase of the
leading ideal.

Internally the engine works on primitive integer term lists; module elements
carry a component index in front of the exponent tuple (position-over-term
order, ideals being the rank-one case).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Optional, Sequence

from .errors import (
    CapExceededError,
    NotFiniteError,
    NotIsolatedError,
)
from .poly import Poly, format_polynomial, jacobian_minor_ideal, parse_polynomial


class _Sentinel:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __repr__(self):
        return self.name


INFINITE = _Sentinel("INFINITE")
CAP_EXCEEDED = _Sentinel("CAP_EXCEEDED")

DEFAULT_DEGREE_CAP = 60

# Coefficients of random linear forms are drawn from this symmetric range.
GENERIC_COEFF_BOUND = 40


@dataclass(frozen=True)
class LocalIdeal:
    """Finitely generated ideal in the local ring at ``base_point``.

    ``base_point`` defaults to the origin; generators are translated there
    before any computation.
    """

    variables: tuple[str, ...]
    generators: tuple[Poly, ...]
    base_point: Optional[tuple[Fraction, ...]] = None

    def __post_init__(self):
        for g in self.generators:
            if g.variables != self.variables:
                raise ValueError("generator variable list mismatch")
        if self.base_point is not None and len(self.base_point) != len(self.variables):
            raise ValueError("base point arity mismatch")

    def translated_generators(self) -> tuple[Poly, ...]:
        if self.base_point is None or all(c == 0 for c in self.base_point):
            return self.generators
        from .poly import substitute

        shift = {
            v: Poly.variable(self.variables, v) + Poly.constant(self.variables, c)
            for v, c in zip(self.variables, self.base_point)
            if c != 0
        }
        return tuple(
            substitute(g, shift, result_variables=self.variables) for g in self.generators
        )

    def canonical_key(self) -> str:
        gens = sorted(format_polynomial(g) for g in self.generators if not g.is_zero())
        point = ""
        if self.base_point is not None and any(c != 0 for c in self.base_point):
            point = ";" + ",".join(str(c) for c in self.base_point)
        return "|".join((",".join(self.variables), *gens)) + point


# ---------------------------------------------------------------------------
# Integer term-list engine.  A monomial is (component, e1, ..., en);
# a polynomial is a list[(monomial, int)] sorted leading-first.
# ---------------------------------------------------------------------------


class _Cap(Exception):
    pass


def _mkey(m: tuple[int, ...]) -> tuple:
    # Larger key = leading.  Component first (smaller component leads),
    # then smaller total degree, then reverse-lex tie break.
    return (-m[0], -sum(m[1:])) + tuple(-e for e in reversed(m[1:]))


def _norm_terms(d: dict[tuple[int, ...], int]) -> list:
    terms = [(m, c) for m, c in d.items() if c]
    if not terms:
        return []
    terms.sort(key=lambda t: _mkey(t[0]), reverse=True)
    g = 0
    for _, c in terms:
        g = gcd(g, abs(c))
    if terms[0][1] < 0:
        g = -g
    if g not in (0, 1):
        terms = [(m, c // g) for m, c in terms]
    return terms


def _poly_to_terms(p: Poly, component: int = 0) -> list:
    if p.is_zero():
        return []
    denom = 1
    for c in p.terms.values():
        denom = denom * c.denominator // gcd(denom, c.denominator)
    d = {}
    for e, c in p.terms.items():
        d[(component,) + e] = int(c * denom)
    return _norm_terms(d)


def _terms_to_poly(terms: list, variables: tuple[str, ...]) -> Poly:
    return Poly(variables, {m[1:]: c for m, c in terms})


def _maxdeg(f: list) -> int:
    return max(sum(m[1:]) for m, _ in f)


def _deg_lead(f: list) -> int:
    return sum(f[0][0][1:])


def _ecart(f: list) -> int:
    return _maxdeg(f) - _deg_lead(f)


def _divides(ma: tuple[int, ...], mb: tuple[int, ...]) -> bool:
    if ma[0] != mb[0]:
        return False
    for a, b in zip(ma[1:], mb[1:]):
        if a > b:
            return False
    return True


def _reduce_step(h: list, g: list) -> list:
    """One Mora reduction of the leading term of h by g (LM(g) | LM(h))."""
    mh, ch = h[0]
    mg, cg = g[0]
    shift = tuple(a - b for a, b in zip(mh[1:], mg[1:]))
    k = gcd(abs(ch), abs(cg))
    a = cg // k
    b = ch // k
    if a < 0:
        a, b = -a, -b
    d = {}
    for m, c in h:
        d[m] = a * c
    for m, c in g:
        mm = (m[0],) + tuple(x + y for x, y in zip(m[1:], shift))
        d[mm] = d.get(mm, 0) - b * c
    return _norm_terms(d)


def _spoly(f: list, g: list) -> list:
    mf, cf = f[0]
    mg, cg = g[0]
    lcm = (mf[0],) + tuple(max(a, b) for a, b in zip(mf[1:], mg[1:]))
    k = gcd(abs(cf), abs(cg))
    af = cg // k
    ag = cf // k
    d = {}
    sf = tuple(a - b for a, b in zip(lcm[1:], mf[1:]))
    for m, c in f:
        mm = (m[0],) + tuple(x + y for x, y in zip(m[1:], sf))
        d[mm] = d.get(mm, 0) + af * c
    sg = tuple(a - b for a, b in zip(lcm[1:], mg[1:]))
    for m, c in g:
        mm = (m[0],) + tuple(x + y for x, y in zip(m[1:], sg))
        d[mm] = d.get(mm, 0) - ag * c
    return _norm_terms(d)


def _mora_normal_form(h: list, basis: list[list], cap: int) -> list:
    """Weak normal form of h against basis (Mora, ecart-minimal selection)."""
    reducers = list(basis)
    while h:
        if _maxdeg(h) > cap:
            raise _Cap()
        mh = h[0][0]
        best = None
        best_ecart = None
        for g in reducers:
            if _divides(g[0][0], mh):
                e = _ecart(g)
                if best is None or e < best_ecart:
                    best, best_ecart = g, e
        if best is None:
            return h
        if best_ecart > _ecart(h):
            reducers.append(h)
        h = _reduce_step(h, best)
    return h


def standard_basis_terms(gens: list[list], cap: int) -> list[list]:
    """Standard basis (Buchberger loop with Mora normal forms)."""
    basis = [g for g in gens if g]
    basis.sort(key=lambda f: _mkey(f[0][0]), reverse=True)
    rank_one = all(m[0] == 0 for g in basis for m, _ in g)
    if rank_one:
        for g in basis:
            if sum(g[0][0][1:]) == 0:  # unit leading term: the whole ring
                return [[(g[0][0][:1] + (0,) * (len(g[0][0]) - 1), 1)]]

    pairs = []

    def push_pairs(j: int):
        mj = basis[j][0][0]
        for i in range(j):
            mi = basis[i][0][0]
            if mi[0] != mj[0]:
                continue
            lcm = tuple(max(a, b) for a, b in zip(mi[1:], mj[1:]))
            if rank_one and all(a + b == l for a, b, l in zip(mi[1:], mj[1:], lcm)):
                continue  # coprime leading monomials reduce to zero (ideal case)
            pairs.append(((_mkey((mi[0],) + lcm), i, j), i, j))

    for j in range(len(basis)):
        push_pairs(j)

    while pairs:
        pairs.sort(key=lambda t: t[0])
        _, i, j = pairs.pop()  # largest key = lowest-degree lcm first
        s = _spoly(basis[i], basis[j])
        if not s:
            continue
        h = _mora_normal_form(s, basis, cap)
        if not h:
            continue
        if rank_one and sum(h[0][0][1:]) == 0:
            return [[(h[0][0][:1] + (0,) * (len(h[0][0]) - 1), 1)]]
        basis.append(h)
        push_pairs(len(basis) - 1)
    return basis


def _minimal_leads(basis: list[list]) -> list[tuple[int, ...]]:
    leads = [g[0][0] for g in basis]
    out = []
    for m in leads:
        if not any(other != m and _divides(other, m) for other in leads):
            if m not in out:
                out.append(m)
    return out


def _is_unit_basis(basis: list[list]) -> bool:
    return any(sum(g[0][0][1:]) == 0 for g in basis)


def reduce_to_normal_form(p: Poly, basis_polys: Sequence[Poly], cap: int = DEFAULT_DEGREE_CAP) -> Poly:
    """Weak normal form of ``p`` against a precomputed standard basis."""
    basis = [_poly_to_terms(g) for g in basis_polys if not g.is_zero()]
    try:
        h = _mora_normal_form(_poly_to_terms(p), basis, cap)
    except _Cap:
        raise CapExceededError("degree cap exceeded during normal form")
    return _terms_to_poly(h, p.variables)


# ---------------------------------------------------------------------------
# Staircase counting
# ---------------------------------------------------------------------------


def _staircase_is_finite(leads: list[tuple[int, ...]], nvars: int, components: Sequence[int]) -> bool:
    # Finite iff every component carries a unit lead or a pure power of
    # every variable among its leads.
    for comp in components:
        comp_leads = [m for m in leads if m[0] == comp]
        if any(sum(m[1:]) == 0 for m in comp_leads):
            continue
        for i in range(nvars):
            if not any(
                m[1 + i] > 0 and all(m[1 + j] == 0 for j in range(nvars) if j != i)
                for m in comp_leads
            ):
                return False
    return True


def _staircase_count(leads: list[tuple[int, ...]], nvars: int, components: Sequence[int]) -> int:
    total = 0
    for comp in components:
        comp_leads = [m[1:] for m in leads if m[0] == comp]
        if nvars == 0:
            total += 0 if any(sum(m) == 0 for m in comp_leads) else 1
            continue
        seen = {(0,) * nvars}
        queue = [(0,) * nvars]
        count = 0
        while queue:
            e = queue.pop()
            if any(all(a >= b for a, b in zip(e, lm)) for lm in comp_leads):
                continue
            count += 1
            for i in range(nvars):
                ne = e[:i] + (e[i] + 1,) + e[i + 1 :]
                if ne not in seen:
                    seen.add(ne)
                    queue.append(ne)
        total += count
    return total


def _staircase_krull_dim(leads: list[tuple[int, ...]], nvars: int) -> int:
    # Rank-one only: maximal subset S of variables such that no leading
    # monomial is supported inside S.
    supports = [frozenset(i for i in range(nvars) if m[1 + i] > 0) for m in leads]
    if any(not s for s in supports):
        return -1  # unit ideal
    best = 0
    for size in range(nvars, 0, -1):
        for subset in combinations(range(nvars), size):
            sset = frozenset(subset)
            if all(not sup <= sset for sup in supports):
                return size
    return best


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


@dataclass
class StandardBasisResult:
    variables: tuple[str, ...]
    basis: list[Poly]
    is_unit: bool
    minimal_leads: list[tuple[int, ...]]  # monomials with component slot


def standard_basis(
    ideal: LocalIdeal,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    cache=None,
) -> StandardBasisResult:
    """Local standard basis of the translated ideal; cached by canonical key."""
    gens = [g for g in ideal.translated_generators() if not g.is_zero()]
    key = None
    if cache is not None:
        key = "sb1|" + LocalIdeal(ideal.variables, tuple(gens)).canonical_key()
        hit = cache.get(key)
        if hit is not None:
            basis = [parse_polynomial(s, ideal.variables) for s in hit]
            tb = [_poly_to_terms(b) for b in basis]
            return StandardBasisResult(
                ideal.variables, basis, _is_unit_basis(tb), _minimal_leads(tb)
            )
    try:
        tb = standard_basis_terms([_poly_to_terms(g) for g in gens], degree_cap)
    except _Cap:
        raise CapExceededError(
            "degree cap exceeded during standard basis", cap=degree_cap
        )
    basis = [_terms_to_poly(t, ideal.variables) for t in tb]
    if cache is not None:
        cache.put(key, [format_polynomial(b) for b in basis])
    return StandardBasisResult(ideal.variables, basis, _is_unit_basis(tb), _minimal_leads(tb))


def local_quotient_dimension(
    ideal: LocalIdeal,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    cache=None,
):
    """Dimension of the local quotient ring as a rational vector space.

    Returns a non-negative integer, or INFINITE when a positive-dimensional
    component passes through the base point, or CAP_EXCEEDED.
    """
    gens = [g for g in ideal.translated_generators() if not g.is_zero()]
    nvars = len(ideal.variables)
    if not gens:
        return 1 if nvars == 0 else INFINITE
    if any(g.constant_term() != 0 for g in gens):
        return 0  # a unit generator: the ideal is the whole local ring
    if nvars == 0:
        return 1
    try:
        sb = standard_basis(LocalIdeal(ideal.variables, tuple(gens)), degree_cap, cache)
    except CapExceededError:
        return CAP_EXCEEDED
    if sb.is_unit:
        return 0
    if not _staircase_is_finite(sb.minimal_leads, nvars, [0]):
        return INFINITE
    return _staircase_count(sb.minimal_leads, nvars, [0])


def quotient_krull_dimension(
    ideal: LocalIdeal, degree_cap: int = DEFAULT_DEGREE_CAP, cache=None
) -> int:
    """Dimension of the zero set germ, read off the leading ideal."""
    gens = [g for g in ideal.translated_generators() if not g.is_zero()]
    nvars = len(ideal.variables)
    if not gens:
        return nvars
    sb = standard_basis(LocalIdeal(ideal.variables, tuple(gens)), degree_cap, cache)
    if sb.is_unit:
        return -1
    return _staircase_krull_dim(sb.minimal_leads, nvars)


def random_linear_form(variables: Sequence[str], rng: random.Random) -> Poly:
    """Random integer linear form, coefficients in the generic range, not all zero."""
    vs = tuple(variables)
    while True:
        coeffs = [rng.randint(-GENERIC_COEFF_BOUND, GENERIC_COEFF_BOUND) for _ in vs]
        if any(coeffs):
            break
    terms = {}
    for i, c in enumerate(coeffs):
        if c:
            e = [0] * len(vs)
            e[i] = 1
            terms[tuple(e)] = Fraction(c)
    return Poly(vs, terms)


@dataclass
class CertifiedValue:
    """A seeded randomized result with its genericity certificate."""

    value: int
    agreed: bool
    samples: tuple[int, ...]

    @property
    def flags(self) -> list[str]:
        return [] if self.agreed else ["GENERICITY_DISAGREEMENT"]


def _milnor_once(
    gens: list[Poly],
    variables: tuple[str, ...],
    rng: random.Random,
    degree_cap: int,
    cache,
) -> int:
    nvars = len(variables)
    d = nvars - len(gens)
    if d < 0:
        raise NotIsolatedError("more equations than variables in Milnor recursion")
    if d == 0:
        q = local_quotient_dimension(LocalIdeal(variables, tuple(gens)), degree_cap, cache)
        if q is INFINITE:
            raise NotIsolatedError("zero-dimensional step has infinite quotient")
        if q is CAP_EXCEEDED:
            raise CapExceededError("degree cap exceeded in Milnor recursion")
        return q - 1
    for _ in range(4):
        p = random_linear_form(variables, rng)
        minors = jacobian_minor_ideal(gens, [p]) if gens else [Poly.constant(variables, 1)]
        q = local_quotient_dimension(
            LocalIdeal(variables, tuple(gens) + tuple(minors)), degree_cap, cache
        )
        if q is CAP_EXCEEDED:
            raise CapExceededError("degree cap exceeded in Milnor recursion")
        if q is not INFINITE:
            slice_mu = _milnor_once(gens + [p], variables, rng, degree_cap, cache)
            return q - slice_mu
    raise NotIsolatedError("critical locus stays infinite for repeated generic forms")


def milnor_icis(
    ideal: LocalIdeal,
    seed: int,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    cache=None,
    retries: int = 4,
) -> CertifiedValue:
    """Milnor number of an isolated complete intersection singularity.

    Computed by slicing with random linear forms drawn from ``seed``;
    certified by recomputation with an independent stream.  On disagreement
    the minimum over extra resamples is returned (semicontinuity makes the
    generic value the minimum) and the certificate flags the report.
    """
    gens = [g for g in ideal.translated_generators() if not g.is_zero()]
    key = ideal.canonical_key()
    samples: list[int] = []
    for attempt in range(2):
        rng = random.Random(f"milnor:{seed}:{attempt}:{key}")
        samples.append(_milnor_once(gens, ideal.variables, rng, degree_cap, cache))
    if samples[0] == samples[1]:
        value = samples[0]
        agreed = True
    else:
        for attempt in range(2, 2 + retries):
            rng = random.Random(f"milnor:{seed}:{attempt}:{key}")
            samples.append(_milnor_once(gens, ideal.variables, rng, degree_cap, cache))
        value = min(samples)
        agreed = False
    if value < 0:
        raise NotIsolatedError(f"negative Milnor number {value}; ideal is not an ICIS")
    return CertifiedValue(value, agreed, tuple(samples))


def milnor_hypersurface_direct(
    g: Poly, degree_cap: int = DEFAULT_DEGREE_CAP, cache=None
) -> int:
    """Milnor number of a hypersurface germ from its Jacobian ideal.

    Independent of the slicing recursion; used as a cross-check.
    """
    partials = [g.diff(v) for v in g.variables]
    q = local_quotient_dimension(LocalIdeal(g.variables, tuple(partials)), degree_cap, cache)
    if q is INFINITE:
        raise NotIsolatedError("non-isolated hypersurface singularity")
    if q is CAP_EXCEEDED:
        raise CapExceededError("degree cap exceeded")
    return q


def tjurina_icis(
    ideal: LocalIdeal, degree_cap: int = DEFAULT_DEGREE_CAP, cache=None
) -> int:
    """Dimension of the space of first-order deformations of the ICIS.

    Quotient of the rank-r free module by the submodule spanned by the
    generators times the basis vectors and the Jacobian columns, via a
    module standard basis in position-over-term local order.
    """
    gens = [g for g in ideal.translated_generators() if not g.is_zero()]
    nvars = len(ideal.variables)
    r = len(gens)
    if r == 0:
        raise NotIsolatedError("empty ideal has no deformation module")
    vectors: list[list] = []
    for comp in range(r):
        for g in gens:
            t = _poly_to_terms(g, component=comp)
            if t:
                vectors.append(t)
    for v in ideal.variables:
        d = {}
        for comp, g in enumerate(gens):
            dg = g.diff(v)
            for e, c in dg.terms.items():
                denomless = c
                d[(comp,) + e] = denomless
        # clear denominators across the whole column
        denom = 1
        for c in d.values():
            denom = denom * c.denominator // gcd(denom, c.denominator)
        col = _norm_terms({m: int(c * denom) for m, c in d.items()})
        if col:
            vectors.append(col)
    try:
        basis = standard_basis_terms(vectors, degree_cap)
    except _Cap:
        raise CapExceededError("degree cap exceeded in deformation module basis")
    leads = _minimal_leads(basis)
    comps = list(range(r))
    if not _staircase_is_finite(leads, nvars, comps):
        raise NotIsolatedError("deformation module has infinite dimension")
    return _staircase_count(leads, nvars, comps)


@dataclass(frozen=True)
class IcisProfile:
    """Summary record of an isolated complete intersection singularity."""

    ambient_dim: int
    codim: int
    dim: int
    milnor: int
    tjurina: Optional[int]
    multiplicity: int


def icis_profile(
    ideal: LocalIdeal,
    seed: int,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    cache=None,
    with_tjurina: bool = True,
) -> IcisProfile:
    """Milnor and Tjurina numbers plus the multiplicity of an ICIS germ.

    The multiplicity is the quotient dimension after cutting down to
    dimension zero by generic hyperplanes through the base point.
    """
    gens = [g for g in ideal.translated_generators() if not g.is_zero()]
    nvars = len(ideal.variables)
    r = len(gens)
    d = nvars - r
    if d < 0:
        raise NotIsolatedError("more generators than variables")
    cert = milnor_icis(ideal, seed, degree_cap, cache)
    rng = random.Random(f"profile:{seed}:{ideal.canonical_key()}")
    cut = list(gens)
    for _ in range(d):
        cut.append(random_linear_form(ideal.variables, rng))
    m0 = local_quotient_dimension(LocalIdeal(ideal.variables, tuple(cut)), degree_cap, cache)
    if m0 is INFINITE or m0 is CAP_EXCEEDED:
        raise NotIsolatedError("multiplicity computation did not terminate")
    tau = tjurina_icis(ideal, degree_cap, cache) if with_tjurina else None
    return IcisProfile(
        ambient_dim=nvars,
        codim=r,
        dim=d,
        milnor=cert.value,
        tjurina=tau,
        multiplicity=m0,
    )


def germ_multiplicity(
    components: Sequence[Poly],
    degree_cap: int = DEFAULT_DEGREE_CAP,
    cache=None,
) -> int:
    """Local multiplicity: dimension of the source ring modulo the pulled-back
    maximal ideal of the target."""
    if not components:
        raise NotFiniteError("no components")
    vs = components[0].variables
    gens = tuple(c - Poly.constant(vs, c.constant_term()) for c in components)
    q = local_quotient_dimension(LocalIdeal(vs, gens), degree_cap, cache)
    if q is INFINITE:
        raise NotFiniteError("map germ is not finite")
    if q is CAP_EXCEEDED:
        raise CapExceededError("degree cap exceeded computing multiplicity")
    return q
