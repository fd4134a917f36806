"""Equivariant structures: bundle maps over group elements, cocycle
validation, the canonical constructions, character twists, existence
tests, and pointwise equivalence of structures.

A bundle map over gamma: z -> c*z^e transports 0-chart section data by
(phi s)_0(gamma z) = N(z) * s_0(z).  All four chart regularity checks
are Laurent-exact because group actions are monomial.  Structures over
the Klein lift group carry one map per lifted element and the center -I
must act by the scalar sign that matches the parity of the degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from random import Random

from .bundle import (VectorBundle, direct_sum, embed_bundle, global_sections,
                     hom, line_bundle, splitting_type)
from .cyclotomic import CycNum, discrete_log_root
from .errors import (DimensionMismatch, InvalidStructure, MissingElement,
                     NoSuchStructure, NotComparable)
from .group import (Character, GroupSpec, characters, element_by_name, elements,
                    identity, klein, lift_by_name, lift_group, lift_moebius,
                    lift_multiply, multiply, cyclic)
from .laurent import LaurentMatrix, LaurentPoly, regular_invertible_at


def is_bundle_map(E: VectorBundle, gamma, N: LaurentMatrix) -> bool:
    """Exactly the four chart regularity/invertibility conditions for a
    bundle automorphism over the Moebius map gamma.

    gamma may be a GroupElement or a LiftedElement (which acts through
    its Klein image)."""
    if N.rows != N.cols or N.rows != E.rank:
        raise DimensionMismatch(
            f"map is {N.rows}x{N.cols}, bundle has rank {E.rank}")
    c, e = _moebius_of(gamma)
    c = c.embed(E.conductor)
    T = E.transition
    Tinv_at_gz = E.inverse_transition().substitute(c, e)
    if e == 1:
        return (regular_invertible_at(N, "zero")
                and regular_invertible_at(Tinv_at_gz @ N @ T, "infinity"))
    return (regular_invertible_at(Tinv_at_gz @ N, "zero")
            and regular_invertible_at(N @ T, "infinity"))


def _moebius_of(gamma):
    if hasattr(gamma, "image"):  # lifted element
        g = lift_moebius(gamma)
        return g.c, g.e
    return gamma.c, gamma.e


@dataclass(frozen=True)
class BundleMap:
    """One bundle map over a group (or lift-group) element: N transports
    0-chart section data, (phi s)_0(gamma z) = N(z) s_0(z)."""
    gamma: object
    matrix: LaurentMatrix

    def is_valid_over(self, E: VectorBundle) -> bool:
        return is_bundle_map(E, self.gamma, self.matrix)


class EquivariantStructure:
    """A bundle together with one bundle map per group element.

    For `lift=True` the maps are indexed by the eight lift-group
    elements and the center acts by a scalar sign."""

    __slots__ = ("bundle", "group", "lift", "maps")

    def __init__(self, bundle: VectorBundle, group: GroupSpec, maps,
                 lift: bool = False):
        target = lcm(bundle.conductor, group.conductor)
        if bundle.conductor != target:
            bundle = embed_bundle(bundle, target)
        names = ([x.name for x in lift_group()] if lift
                 else [g.name for g in elements(group)])
        fixed = {}
        for name in names:
            if name not in maps:
                raise MissingElement(f"structure lacks a map for {name!r}")
            N = maps[name]
            if N.rows != N.cols or N.rows != bundle.rank:
                raise DimensionMismatch(
                    f"map for {name!r} is {N.rows}x{N.cols}, rank is {bundle.rank}")
            fixed[name] = N if N.conductor == target else N.embed(target)
        object.__setattr__(self, "bundle", bundle)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "lift", lift)
        object.__setattr__(self, "maps", fixed)

    def __setattr__(self, name, value):
        raise AttributeError("EquivariantStructure is immutable")

    @property
    def conductor(self) -> int:
        return self.bundle.conductor

    def action_items(self):
        """(name, c embedded in the structure field, e) per indexing element."""
        out = []
        if self.lift:
            for x in lift_group():
                g = lift_moebius(x)
                out.append((x.name, g.c.embed(self.conductor), g.e))
        else:
            for g in elements(self.group):
                out.append((g.name, g.c.embed(self.conductor), g.e))
        return out

    def product_name(self, name1: str, name2: str) -> str:
        if self.lift:
            return lift_multiply(lift_by_name(name1), lift_by_name(name2)).name
        return multiply(self.group, element_by_name(self.group, name1),
                        element_by_name(self.group, name2)).name

    def map_for(self, name: str) -> LaurentMatrix:
        return self.maps[name]

    def bundle_map(self, name: str) -> BundleMap:
        return BundleMap(gamma=_gamma_for(self, name), matrix=self.maps[name])

    def __eq__(self, other):
        if not isinstance(other, EquivariantStructure):
            return NotImplemented
        return (self.bundle == other.bundle and self.group == other.group
                and self.lift == other.lift and self.maps == other.maps)

    def __repr__(self):
        kind = "lift" if self.lift else "genuine"
        return (f"EquivariantStructure({kind}, group={self.group}, "
                f"rank={self.bundle.rank}, degree={self.bundle.degree()})")


def validation_report(S: EquivariantStructure):
    """All validation failures as human-readable strings (empty = valid)."""
    problems = []
    items = S.action_items()
    ident = LaurentMatrix.identity(S.conductor, S.bundle.rank)
    id_name = "I" if S.lift else identity(S.group).name
    if S.maps[id_name] != ident:
        problems.append(f"map for the identity {id_name!r} is not Id")
    if S.lift and S.maps["-I"] != ident and S.maps["-I"] != ident.scale(-1):
        problems.append("central element -I does not act by a scalar sign")
    for name, c, e in items:
        if not is_bundle_map(S.bundle, _gamma_for(S, name), S.maps[name]):
            problems.append(f"map for {name!r} fails the bundle-map regularity checks")
    for n1, c1, e1 in items:
        for n2, c2, e2 in items:
            left = S.maps[S.product_name(n1, n2)]
            right = S.maps[n1].substitute(c2, e2) @ S.maps[n2]
            if left != right:
                problems.append(
                    f"cocycle fails on ({n1!r}, {n2!r}): "
                    f"N_{{{n1}{n2}}} != N_{n1}({n2}.z) N_{n2}")
    return problems


def _gamma_for(S, name):
    return lift_by_name(name) if S.lift else element_by_name(S.group, name)


def validate_structure(S: EquivariantStructure) -> bool:
    return not validation_report(S)


# ---------------------------------------------------------------------------
# canonical structures
# ---------------------------------------------------------------------------

def canonical_cyclic(n: int, d: int) -> EquivariantStructure:
    """Tensor powers of the tautological action: every map is the constant 1."""
    G = cyclic(n)
    E = line_bundle(G.conductor, d)
    one = LaurentMatrix.identity(G.conductor, 1)
    maps = {g.name: one for g in elements(G)}
    return EquivariantStructure(E, G, maps)


def canonical_klein_even(d: int) -> EquivariantStructure:
    """Tensor powers of the derivative lift on the tangent bundle O(2)."""
    if d % 2 != 0:
        raise NoSuchStructure(
            f"O({d}) carries no Klein structure: odd degree")
    m = d // 2
    sign = -1 if m % 2 else 1
    E = line_bundle(4, d)
    mk = lambda c, e: LaurentMatrix(4, [[LaurentPoly(4, {e: c})]])
    maps = {
        "e": mk(1, 0),
        "a1": mk(sign, 0),
        "a2": mk(sign, -d),
        "a1a2": mk(1, -d),
    }
    return EquivariantStructure(E, klein(), maps)


def canonical_tangent() -> EquivariantStructure:
    """The derivative lift itself: N_a1 = -1, N_a2 = -z^-2, N_a1a2 = z^-2."""
    return canonical_klein_even(2)


def canonical_klein_lift(d: int) -> EquivariantStructure:
    """Lift-group structure on O(d) from the tautological GL(2) action;
    the center acts by (-1)^d."""
    E = line_bundle(4, d)
    s = -1 if d % 2 else 1
    mk = lambda c, e: LaurentMatrix(4, [[LaurentPoly(4, {e: c})]])
    maps = {
        "I": mk(1, 0), "-I": mk(s, 0),
        "A1": mk(1, 0), "-A1": mk(s, 0),
        "A2": mk(1, -d), "-A2": mk(s, -d),
        "A1A2": mk(1, -d), "-A1A2": mk(s, -d),
    }
    return EquivariantStructure(E, klein(), maps, lift=True)


def canonical_klein_pair(d: int) -> EquivariantStructure:
    """The genuine Klein structure on O(d) + O(d) for odd d, descending
    from the lift scalars tensored with the anticommuting constant pair."""
    if d % 2 == 0:
        raise ValueError("pair blocks are reserved for odd degrees")
    E = direct_sum(line_bundle(4, d), line_bundle(4, d))
    z = lambda e: LaurentPoly(4, {e: 1})
    zz = LaurentPoly.zero(4)
    c = lambda v: LaurentPoly.const(4, v)
    maps = {
        "e": LaurentMatrix.identity(4, 2),
        "a1": LaurentMatrix(4, [[c(-1), zz], [zz, c(1)]]),
        "a2": LaurentMatrix(4, [[zz, z(-d)], [z(-d), zz]]),
        "a1a2": LaurentMatrix(4, [[zz, z(-d).scale(-1)], [z(-d), zz]]),
    }
    return EquivariantStructure(E, klein(), maps)


def canonical_structure(G: GroupSpec, degrees, lift: bool = False) -> EquivariantStructure:
    """Direct sum of canonical blocks for the given degree multiset.

    Cyclic groups accept any degrees.  The Klein group needs every odd
    degree with even multiplicity (pairs); `lift=True` builds the
    lift-group structure on a single line bundle instead."""
    degrees = sorted(degrees, reverse=True)
    if lift:
        if G.kind != "klein" or len(degrees) != 1:
            raise ValueError("lift structures are single Klein line bundles")
        return canonical_klein_lift(degrees[0])
    if G.kind == "cyclic":
        out = canonical_cyclic(G.n, degrees[0])
        for d in degrees[1:]:
            out = direct_sum_structures(out, canonical_cyclic(G.n, d))
        return out
    blocks = []
    i = 0
    while i < len(degrees):
        d = degrees[i]
        if d % 2 == 0:
            blocks.append(canonical_klein_even(d))
            i += 1
        else:
            if i + 1 >= len(degrees) or degrees[i + 1] != d:
                raise NoSuchStructure(
                    f"O({d}) carries no Klein structure: odd degree "
                    "must come in pairs")
            blocks.append(canonical_klein_pair(d))
            i += 2
    out = blocks[0]
    for b in blocks[1:]:
        out = direct_sum_structures(out, b)
    return out


def direct_sum_structures(S1: EquivariantStructure,
                          S2: EquivariantStructure) -> EquivariantStructure:
    if S1.group != S2.group or S1.lift != S2.lift:
        raise NotComparable("direct sum needs the same group and kind")
    bundle = direct_sum(S1.bundle, S2.bundle)
    maps = {name: LaurentMatrix.block_diag([S1.maps[name], S2.maps[name]])
            for name in S1.maps}
    return EquivariantStructure(bundle, S1.group, maps, lift=S1.lift)


def embed_structure(S: EquivariantStructure, conductor: int) -> EquivariantStructure:
    """The same structure with scalars in a larger cyclotomic field."""
    if S.conductor == conductor:
        return S
    return EquivariantStructure(embed_bundle(S.bundle, conductor), S.group,
                                {k: v.embed(conductor) for k, v in S.maps.items()},
                                lift=S.lift)


def central_sign(S: EquivariantStructure) -> int:
    """+1 or -1 according to how the lift-group center acts."""
    if not S.lift:
        raise InvalidStructure("only lift structures have a central sign")
    ident = LaurentMatrix.identity(S.conductor, S.bundle.rank)
    if S.maps["-I"] == ident:
        return 1
    if S.maps["-I"] == ident.scale(-1):
        return -1
    raise InvalidStructure("center does not act by a scalar sign")


def descend_lift(S: EquivariantStructure) -> EquivariantStructure:
    """Convert a lift structure with trivially-acting center into the
    genuine structure it factors through."""
    if central_sign(S) != 1:
        raise NoSuchStructure(
            "the center acts by -1, the action does not factor through the quotient")
    maps = {"e": S.maps["I"], "a1": S.maps["A1"],
            "a2": S.maps["A2"], "a1a2": S.maps["A1A2"]}
    return EquivariantStructure(S.bundle, S.group, maps)


# ---------------------------------------------------------------------------
# character twists and the torsor structure
# ---------------------------------------------------------------------------

def twist_by_character(S: EquivariantStructure, chi: Character) -> EquivariantStructure:
    """Multiply every map by the character value; always validates when S does."""
    if S.lift:
        raise InvalidStructure("character twists act on genuine structures")
    if chi.group != S.group:
        raise NotComparable("character belongs to a different group")
    maps = {name: N.scale(chi.value(name).embed(S.conductor))
            for name, N in S.maps.items()}
    return EquivariantStructure(S.bundle, S.group, maps)


def structure_quotient(S1: EquivariantStructure,
                       S2: EquivariantStructure) -> Character:
    """The unique character chi with S1 = twist_by_character(S2, chi);
    rank-1 automorphisms are constants, so the ratio of the two cocycles
    is a character."""
    if S1.bundle != S2.bundle or S1.group != S2.group or S1.lift != S2.lift:
        raise NotComparable("structures live on different bundles or groups")
    if S1.bundle.rank != 1:
        raise NotComparable("structure quotients are defined for line bundles")
    if S1.lift:
        raise InvalidStructure("structure quotients act on genuine structures")
    G = S1.group

    def ratio(name):
        a = S1.maps[name].entries[0][0]
        b = S2.maps[name].entries[0][0]
        q = a.divexact(b)
        if not q.is_constant():
            raise InvalidStructure(f"ratio at {name!r} is not constant: {q}")
        return q.coeff(0)

    if G.kind == "cyclic":
        if G.n == 1:
            return characters(G)[0]
        k = discrete_log_root(ratio("g"), G.n)
        if k is None:
            raise InvalidStructure("ratio on the generator is not a root of unity")
        return Character(G, index=k)
    s1 = ratio("a1")
    s2 = ratio("a2")
    signs = []
    for s in (s1, s2):
        if s == 1:
            signs.append(1)
        elif s == -1:
            signs.append(-1)
        else:
            raise InvalidStructure(f"Klein ratio {s} is not a sign")
    return Character(G, signs=tuple(signs))


# ---------------------------------------------------------------------------
# existence and equivalence
# ---------------------------------------------------------------------------

def existence(E: VectorBundle, G: GroupSpec) -> bool:
    """Cyclic groups act on everything; the Klein group needs every odd
    splitting degree with even multiplicity."""
    if G.kind == "cyclic":
        return True
    st = splitting_type(E)
    counts = {}
    for d in st.degrees:
        counts[d] = counts.get(d, 0) + 1
    return all(d % 2 == 0 or c % 2 == 0 for d, c in counts.items())


def conjugate_structure(S: EquivariantStructure, U: LaurentMatrix) -> EquivariantStructure:
    """Conjugate by a bundle automorphism U of the same bundle:
    N'_gamma(z) = U(gamma z) N_gamma(z) U(z)^(-1)."""
    return transport_structure(S, U, S.bundle)


def transport_structure(S: EquivariantStructure, F: LaurentMatrix,
                        target: VectorBundle) -> EquivariantStructure:
    """Move S along an isomorphism F: S.bundle -> target (0-chart data)."""
    Finv = F.inverse()
    maps = {}
    for name, c, e in S.action_items():
        maps[name] = F.substitute(c, e) @ S.maps[name] @ Finv
    return EquivariantStructure(target, S.group, maps, lift=S.lift)


def automorphism_sections(E: VectorBundle):
    """Basis of H0(End E) reshaped to r x r Laurent matrices (0-chart data)."""
    r = E.rank
    sections = global_sections(hom(E, E))
    mats = []
    for s in sections:
        grid = [[s.s_zero[i * r + j] for j in range(r)] for i in range(r)]
        mats.append(LaurentMatrix(E.conductor, grid))
    return mats


def structures_equivalent(S1: EquivariantStructure, S2: EquivariantStructure,
                          seed: int = 0, tries: int = 80) -> bool:
    """Decide whether some bundle automorphism intertwines the two
    structures: U(gamma z) N1_gamma(z) = N2_gamma(z) U(z) for all gamma.

    The intertwiner space is computed exactly; picking an invertible
    point in it uses a seeded bounded search."""
    if S1.bundle != S2.bundle or S1.group != S2.group or S1.lift != S2.lift:
        raise NotComparable("structures live on different bundles or groups")
    if not validate_structure(S1) or not validate_structure(S2):
        raise InvalidStructure("equivalence testing needs validated structures")
    E = S1.bundle
    basis = automorphism_sections(E)
    if not basis:
        return False
    # linear conditions on combination coefficients x_b
    rows = []
    for name, c, e in S1.action_items():
        diffs = [b.substitute(c, e) @ S1.maps[name] - S2.maps[name] @ b
                 for b in basis]
        keys = set()
        for dmat in diffs:
            for i in range(E.rank):
                for j in range(E.rank):
                    keys.update((i, j, ex) for ex in dmat.entries[i][j].coeffs)
        for (i, j, ex) in sorted(keys):
            rows.append([dmat.entries[i][j].coeff(ex) for dmat in diffs])
    from .linalg import kernel_dense
    kernel = kernel_dense(rows, len(basis), E.conductor)
    if not kernel:
        return False

    def assemble(coeffs):
        acc = None
        for x, b in zip(coeffs, basis):
            if isinstance(x, int):
                x = CycNum.rational(E.conductor, x)
            if x.is_zero():
                continue
            term = b.scale(x)
            acc = term if acc is None else acc + term
        return acc

    def invertible(U):
        if U is None:
            return False
        d = U.det()
        return d.is_constant() and not d.is_zero()

    for vec in kernel:
        U = assemble(vec)
        if invertible(U):
            return True
    rng = Random(seed)
    for _ in range(tries):
        coeffs = [rng.randint(-5, 5) for _ in kernel]
        combo = [sum((CycNum.rational(E.conductor, c) * v[b]
                      for c, v in zip(coeffs, kernel)), CycNum.zero(E.conductor))
                 for b in range(len(basis))]
        U = assemble(combo)
        if invertible(U):
            return True
    return False
