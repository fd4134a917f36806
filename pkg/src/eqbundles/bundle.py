"""Vector bundles on the projective line as Laurent transition matrices.

Conventions, fixed once for the whole package:

* charts are z (around 0) and w = 1/z (around infinity);
* a section is a pair of polynomial vectors (s0(z), sinf(w)) glued by
  s0(z) = T(z) * sinf(1/z);
* under this convention T(z) = z^n is the degree-n line bundle O(n), and
  h0(O(n)) = max(0, n+1) with no sign gymnastics.

Splitting types are computed by scanning the exact dimension of twisted
section spaces; the constructive model isomorphism onto diag(z^(d_j))
is self-certifying through two chart-regularity checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random

from .cyclotomic import CycNum
from .errors import (ConductorMismatch, DimensionMismatch, InternalInconsistency,
                     NonUnimodular, SearchExhausted)
from .laurent import LaurentMatrix, LaurentPoly, regular_invertible_at
from .linalg import sparse_kernel, sparse_rank


class VectorBundle:
    """rank + transition matrix on the two-chart cover of the projective line."""

    __slots__ = ("rank", "conductor", "transition", "_inverse", "_det_unit")

    def __init__(self, transition: LaurentMatrix, _inverse=None, _det_unit=None):
        if transition.rows != transition.cols:
            raise DimensionMismatch("transition matrix must be square")
        if _det_unit is None:
            d = transition.det()
            _det_unit = d.unit_monomial()
            if _det_unit is None:
                raise NonUnimodular(
                    f"transition determinant {d} is not a unit monomial")
        object.__setattr__(self, "rank", transition.rows)
        object.__setattr__(self, "conductor", transition.conductor)
        object.__setattr__(self, "transition", transition)
        object.__setattr__(self, "_inverse", _inverse)
        object.__setattr__(self, "_det_unit", _det_unit)

    def __setattr__(self, name, value):
        raise AttributeError("VectorBundle is immutable")

    def inverse_transition(self) -> LaurentMatrix:
        if self._inverse is None:
            object.__setattr__(self, "_inverse", self.transition.inverse())
        return self._inverse

    def degree(self) -> int:
        return self._det_unit[1]

    def __eq__(self, other):
        if not isinstance(other, VectorBundle):
            return NotImplemented
        return self.transition == other.transition

    def __repr__(self):
        return f"VectorBundle(rank={self.rank}, degree={self.degree()}, T={self.transition})"


def make_bundle(transition: LaurentMatrix) -> VectorBundle:
    """Validate a transition matrix and wrap it as a bundle."""
    return VectorBundle(transition)


def line_bundle(conductor: int, n: int) -> VectorBundle:
    """O(n): transition z^n."""
    t = LaurentMatrix(conductor, [[LaurentPoly.monomial(conductor, n)]])
    return VectorBundle(t, _inverse=LaurentMatrix(
        conductor, [[LaurentPoly.monomial(conductor, -n)]]),
        _det_unit=(CycNum.one(conductor), n))


def model_bundle(conductor: int, degrees) -> VectorBundle:
    """diag(z^(d_1), ..., z^(d_r)) for the given degree sequence."""
    degrees = list(degrees)
    t = LaurentMatrix.diag_monomials(conductor, degrees)
    inv = LaurentMatrix.diag_monomials(conductor, [-d for d in degrees])
    return VectorBundle(t, _inverse=inv,
                        _det_unit=(CycNum.one(conductor), sum(degrees)))


def degree(E: VectorBundle) -> int:
    return E.degree()


def twist(E: VectorBundle, k: int) -> VectorBundle:
    """E(k): multiply the transition by z^k."""
    c, e = E._det_unit
    return VectorBundle(E.transition.shift(k),
                        _inverse=None if E._inverse is None else E._inverse.shift(-k),
                        _det_unit=(c, e + k * E.rank))


def dual(E: VectorBundle) -> VectorBundle:
    t = E.inverse_transition().transpose()
    c, e = E._det_unit
    return VectorBundle(t, _inverse=E.transition.transpose(),
                        _det_unit=(c.inverse(), -e))


def hom(E: VectorBundle, F: VectorBundle) -> VectorBundle:
    """Hom(E, F) = F tensor dual(E); sections reshape to maps E -> F."""
    if E.conductor != F.conductor:
        raise ConductorMismatch("hom of bundles over different conductors")
    dE = dual(E)
    t = LaurentMatrix.kron(F.transition, dE.transition)
    inv = LaurentMatrix.kron(F.inverse_transition(), dE.inverse_transition())
    cF, eF = F._det_unit
    cDE, eDE = dE._det_unit
    det_c = cF ** dE.rank * cDE ** F.rank
    det_e = eF * dE.rank + eDE * F.rank
    return VectorBundle(t, _inverse=inv, _det_unit=(det_c, det_e))


def direct_sum(E: VectorBundle, F: VectorBundle) -> VectorBundle:
    if E.conductor != F.conductor:
        raise ConductorMismatch("direct sum of bundles over different conductors")
    t = LaurentMatrix.block_diag([E.transition, F.transition])
    inv = LaurentMatrix.block_diag([E.inverse_transition(), F.inverse_transition()])
    cE, eE = E._det_unit
    cF, eF = F._det_unit
    return VectorBundle(t, _inverse=inv, _det_unit=(cE * cF, eE + eF))


def embed_bundle(E: VectorBundle, conductor: int) -> VectorBundle:
    """The same bundle with scalars re-expressed in a larger cyclotomic field."""
    if conductor == E.conductor:
        return E
    c, e = E._det_unit
    return VectorBundle(E.transition.embed(conductor),
                        _inverse=None if E._inverse is None
                        else E._inverse.embed(conductor),
                        _det_unit=(c.embed(conductor), e))


# ---------------------------------------------------------------------------
# sections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Section:
    """A global section: s_zero(z) = T(z) * s_infty(1/z), both polynomial."""
    s_zero: tuple
    s_infty: tuple


def _section_degree_bound(E: VectorBundle) -> int:
    # any section satisfies sinf(1/z) = T^(-1) s0(z) with s0 polynomial,
    # so deg_w(sinf) <= -min exponent of T^(-1)
    me = E.inverse_transition().min_exp()
    return max(0, -me) if me is not None else 0


def _section_system(E: VectorBundle):
    """Sparse rows forcing 'no negative z-powers in T(z) sinf(1/z)'.

    Unknowns are the w-coefficients of sinf, indexed i*(B+1)+j for
    coordinate i and power w^j."""
    r = E.rank
    bound = _section_degree_bound(E)
    nvars = r * (bound + 1)
    rows = {}
    for l in range(r):
        for i in range(r):
            entry = E.transition.entries[l][i]
            for t, c in entry.coeffs.items():
                for j in range(bound + 1):
                    e = t - j
                    if e >= 0:
                        continue
                    key = (l, e)
                    row = rows.setdefault(key, {})
                    var = i * (bound + 1) + j
                    cur = row.get(var)
                    row[var] = c if cur is None else cur + c
    clean = []
    for row in rows.values():
        row = {v: c for v, c in row.items() if not c.is_zero()}
        if row:
            clean.append(row)
    return clean, nvars, bound


def h0(E: VectorBundle) -> int:
    """Exact dimension of the space of global sections."""
    rows, nvars, _ = _section_system(E)
    return nvars - sparse_rank(rows)


def global_sections(E: VectorBundle):
    """Canonical basis of global sections (empty when there are none)."""
    rows, nvars, bound = _section_system(E)
    basis = sparse_kernel(rows, nvars, E.conductor)
    out = []
    for vec in basis:
        sinf = []
        for i in range(E.rank):
            coeffs = {j: vec[i * (bound + 1) + j] for j in range(bound + 1)}
            sinf.append(LaurentPoly(E.conductor, coeffs))
        out.append(_section_from_sinf(E, sinf))
    return out


def _section_from_sinf(E: VectorBundle, sinf) -> Section:
    one = CycNum.one(E.conductor)
    sub = [p.substitute(one, -1) for p in sinf]
    s_zero = []
    for l in range(E.rank):
        acc = LaurentPoly.zero(E.conductor)
        for i in range(E.rank):
            t = E.transition.entries[l][i]
            if not t.is_zero() and not sub[i].is_zero():
                acc = acc + t * sub[i]
        me = acc.min_exp()
        if me is not None and me < 0:
            raise InternalInconsistency("section is not polynomial on the 0-chart")
        s_zero.append(acc)
    return Section(s_zero=tuple(s_zero), s_infty=tuple(sinf))


def section_combination(E: VectorBundle, sections, coeffs) -> Section:
    """Exact linear combination of sections of the same bundle."""
    r = E.rank
    zero = LaurentPoly.zero(E.conductor)
    s_zero = [zero] * r
    s_infty = [zero] * r
    for s, c in zip(sections, coeffs):
        if isinstance(c, int):
            c = CycNum.rational(E.conductor, c)
        for i in range(r):
            s_zero[i] = s_zero[i] + s.s_zero[i].scale(c)
            s_infty[i] = s_infty[i] + s.s_infty[i].scale(c)
    return Section(s_zero=tuple(s_zero), s_infty=tuple(s_infty))


# ---------------------------------------------------------------------------
# splitting type and Harder-Narasimhan data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplittingType:
    """Multiset {n_1 >= n_2 >= ... >= n_r} with E isomorphic to the direct
    sum of the O(n_i)."""
    degrees: tuple

    def __post_init__(self):
        if list(self.degrees) != sorted(self.degrees, reverse=True):
            raise ValueError("splitting degrees must be sorted descending")

    def __str__(self):
        return "{" + ", ".join(str(d) for d in self.degrees) + "}"


@dataclass(frozen=True)
class HNData:
    """Filtration steps (slope, rank), slopes strictly decreasing."""
    steps: tuple


def splitting_type(E: VectorBundle) -> SplittingType:
    """Recover the degrees from the jump pattern of k -> h0(E(k))."""
    r, d = E.rank, E.degree()
    cache = {}

    def f(k):
        if k not in cache:
            cache[k] = h0(twist(E, k))
        return cache[k]

    guard = 4 * (E.transition.max_abs_exp()
                 + E.inverse_transition().max_abs_exp()) + abs(d) + r + 8
    k = -(-d // r)  # ceil(d / r), always between min and max degree
    steps = 0
    if f(k) == 0:
        while f(k + 1) == 0:
            k += 1
            steps += 1
            if steps > guard:
                raise InternalInconsistency("h0 scan did not start")
    else:
        while f(k) > 0:
            k -= 1
            steps += 1
            if steps > guard:
                raise InternalInconsistency("h0 scan did not reach zero")
    # now f(k) = 0 and f(k+1) > 0; walk upward reading off multiplicities
    degs = []
    prev_diff = 0
    while len(degs) < r:
        k += 1
        steps += 1
        if steps > guard:
            raise InternalInconsistency("h0 scan did not terminate")
        diff = f(k) - f(k - 1)
        if diff < prev_diff or diff > r:
            raise InternalInconsistency(
                f"h0 difference sequence left [0, r]: {diff} after {prev_diff}")
        degs.extend([-k] * (diff - prev_diff))
        prev_diff = diff
    if len(degs) != r or sum(degs) != d:
        raise InternalInconsistency(
            f"splitting scan inconsistent: degrees {degs}, degree {d}")
    return SplittingType(tuple(degs))


def hn_data(E: VectorBundle) -> HNData:
    """Group the splitting type by slope, descending."""
    st = splitting_type(E)
    steps = []
    for n in st.degrees:
        if steps and steps[-1][0] == n:
            steps[-1] = (n, steps[-1][1] + 1)
        else:
            steps.append((n, 1))
    return HNData(steps=tuple(steps))


# ---------------------------------------------------------------------------
# constructive model isomorphism
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelIso:
    """Columns of psi are 0-chart parts of sections of E(-d_j); the two
    regularity certificates make psi an isomorphism diag(z^(d_j)) -> E."""
    model: SplittingType
    psi: LaurentMatrix
    bundle: VectorBundle


class _RankTracker:
    """Incremental exact rank over CycNum column vectors."""

    def __init__(self, conductor):
        self.conductor = conductor
        self.pivot_rows = []  # (pivot index, normalized vector)

    def residual(self, vec):
        vec = list(vec)
        for idx, prow in self.pivot_rows:
            f = vec[idx]
            if not f.is_zero():
                vec = [a - f * b for a, b in zip(vec, prow)]
        return vec

    def would_grow(self, vec):
        return any(not c.is_zero() for c in self.residual(vec))

    def add(self, vec):
        vec = self.residual(vec)
        for idx, c in enumerate(vec):
            if not c.is_zero():
                inv = c.inverse()
                self.pivot_rows.append((idx, [x * inv for x in vec]))
                return True
        return False


def _eval0(polys):
    return [p.coeff(0) for p in polys]


def model_isomorphism(E: VectorBundle, seed: int = 0) -> ModelIso:
    """Pick sections of the twists E(-d_j) whose evaluations at the two
    chart points stay jointly invertible; greedy first, then seeded
    random combinations."""
    st = splitting_type(E)
    bases = {}
    for dd in set(st.degrees):
        bases[dd] = global_sections(twist(E, -dd))
    rng = Random(seed)

    def greedy():
        tracker0 = _RankTracker(E.conductor)
        trackerinf = _RankTracker(E.conductor)
        chosen = []
        for dd in st.degrees:
            base = bases[dd]
            pick = None
            for s in base:
                if (tracker0.would_grow(_eval0(s.s_zero))
                        and trackerinf.would_grow(_eval0(s.s_infty))):
                    pick = s
                    break
            if pick is None:
                twisted = twist(E, -dd)
                for _ in range(40):
                    coeffs = [rng.randint(-4, 4) for _ in base]
                    s = section_combination(twisted, base, coeffs)
                    if (tracker0.would_grow(_eval0(s.s_zero))
                            and trackerinf.would_grow(_eval0(s.s_infty))):
                        pick = s
                        break
            if pick is None:
                return None
            tracker0.add(_eval0(pick.s_zero))
            trackerinf.add(_eval0(pick.s_infty))
            chosen.append(pick)
        return chosen

    def fully_random():
        chosen = []
        for dd in st.degrees:
            base = bases[dd]
            twisted = twist(E, -dd)
            coeffs = [rng.randint(-9, 9) for _ in base]
            chosen.append(section_combination(twisted, base, coeffs))
        return chosen

    chosen = greedy()
    attempts = 0
    while chosen is None or not _certify(E, st, chosen):
        attempts += 1
        if attempts > 60:
            raise SearchExhausted("model isomorphism search exhausted its budget")
        chosen = fully_random()

    psi = LaurentMatrix(E.conductor,
                        [[chosen[j].s_zero[i] for j in range(E.rank)]
                         for i in range(E.rank)])
    return ModelIso(model=st, psi=psi, bundle=E)


def _certify(E, st, chosen):
    psi = LaurentMatrix(E.conductor,
                        [[chosen[j].s_zero[i] for j in range(E.rank)]
                         for i in range(E.rank)])
    if not regular_invertible_at(psi, "zero"):
        return False
    corrected = (E.inverse_transition() @ psi
                 @ LaurentMatrix.diag_monomials(E.conductor, st.degrees))
    return regular_invertible_at(corrected, "infinity")
