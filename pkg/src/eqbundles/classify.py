"""The classification pipeline and its machine-checkable certificates.

Order of battle for a validated genuine structure S on a bundle E:

1. pull the cocycle back along a model isomorphism onto diag(z^(d_j)),
   where it becomes block-triangular in descending-degree order;
2. average the inverse cocycle against its block-diagonal part, which
   yields a unipotent intertwiner splitting off the diagonal blocks;
3. factor each diagonal degree block as a reference scalar cocycle
   times a constant representation;
4. split the constant representation: simultaneous eigenvectors with
   characters for cyclic groups and even Klein blocks, eigenvector
   pairs swapped by the anticommuting generator for odd Klein blocks.

The certificate records the block data plus the composite change of
frame; `verify_certificate` replays it exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bundle import ModelIso, model_isomorphism
from .cyclotomic import CycNum, root_of_unity
from .errors import (FactorizationFailure, InternalInconsistency, InvalidStructure,
                     NotBlockDiagonalPart, RelationViolation, ShapeMismatch,
                     TriangularityViolation)
from .equivariant import (EquivariantStructure, canonical_cyclic,
                          canonical_klein_even, canonical_klein_lift,
                          canonical_klein_pair, direct_sum_structures,
                          embed_structure, transport_structure,
                          twist_by_character, validate_structure)
from .group import Character, GroupSpec, characters, elements, multiply
from .laurent import LaurentMatrix, LaurentPoly, regular_invertible_at
from .linalg import eigenspace, kernel_dense, mat_vec_const


@dataclass(frozen=True)
class ModelStructure:
    """A genuine cocycle on the model bundle diag(z^(d_j)), block
    upper-triangular in descending-degree order."""
    group: GroupSpec
    degrees: tuple
    maps: dict
    conductor: int

    def action_items(self):
        return [(g.name, g.c.embed(self.conductor), g.e)
                for g in elements(self.group)]

    def product_name(self, n1, n2):
        from .group import element_by_name
        return multiply(self.group, element_by_name(self.group, n1),
                        element_by_name(self.group, n2)).name


def _block_ranges(degrees):
    """[(degree, start, stop)] for maximal runs of equal degree."""
    out = []
    start = 0
    for i in range(1, len(degrees) + 1):
        if i == len(degrees) or degrees[i] != degrees[start]:
            out.append((degrees[start], start, i))
            start = i
    return out


def pullback_structure(S: EquivariantStructure, iso: ModelIso) -> ModelStructure:
    """N'_gamma(z) = psi(gamma z)^(-1) N_gamma(z) psi(z); the result is
    block-triangular because a line of some degree admits no nonzero map
    into a line of strictly smaller degree."""
    if S.lift:
        raise InvalidStructure("pullback expects a genuine structure")
    psi_inv = iso.psi.inverse()
    degrees = iso.model.degrees
    maps = {}
    for name, c, e in S.action_items():
        pulled = psi_inv.substitute(c, e) @ S.maps[name] @ iso.psi
        for i in range(len(degrees)):
            for j in range(len(degrees)):
                if degrees[i] < degrees[j] and not pulled.entries[i][j].is_zero():
                    raise TriangularityViolation(
                        f"pulled-back map for {name!r} has a nonzero entry "
                        f"from degree {degrees[j]} down to {degrees[i]}")
        maps[name] = pulled
    return ModelStructure(S.group, degrees, maps, S.conductor)


def block_diagonal_part(N: ModelStructure) -> ModelStructure:
    """Zero out all cross-block entries; diagonal parts of triangular
    cocycles multiply, so the result is again a cocycle."""
    ranges = _block_ranges(N.degrees)
    zero = LaurentPoly.zero(N.conductor)
    maps = {}
    for name, mat in N.maps.items():
        grid = [[zero] * len(N.degrees) for _ in N.degrees]
        for (_, start, stop) in ranges:
            for i in range(start, stop):
                for j in range(start, stop):
                    grid[i][j] = mat.entries[i][j]
        maps[name] = LaurentMatrix(N.conductor, grid)
    return ModelStructure(N.group, N.degrees, maps, N.conductor)


def averaging_intertwiner(N: ModelStructure, R: ModelStructure) -> LaurentMatrix:
    """S(z) = 1/|G| * sum_gamma N_gamma(z)^(-1) R_gamma(z).

    Checked exactly: S is unipotent block-triangular, and
    N_gamma(z) S(z) = S(gamma z) R_gamma(z) for every gamma."""
    if N.degrees != R.degrees or N.group != R.group:
        raise NotBlockDiagonalPart("mismatched model structures")
    ranges = _block_ranges(N.degrees)
    for name, mat in R.maps.items():
        ref = N.maps[name]
        for (_, start, stop) in ranges:
            for i in range(start, stop):
                for j in range(len(N.degrees)):
                    inside = start <= j < stop
                    if inside and mat.entries[i][j] != ref.entries[i][j]:
                        raise NotBlockDiagonalPart(
                            f"diagonal block of R differs from N at {name!r}")
                    if not inside and not mat.entries[i][j].is_zero():
                        raise NotBlockDiagonalPart(
                            f"R has off-diagonal data at {name!r}")
    order = N.group.order
    acc = None
    for name, c, e in N.action_items():
        term = N.maps[name].inverse() @ R.maps[name]
        acc = term if acc is None else acc + term
    S = acc.scale(Fraction(1, order))
    # postconditions
    ident = LaurentMatrix.identity(N.conductor, len(N.degrees))
    for (_, start, stop) in ranges:
        for i in range(start, stop):
            for j in range(start, stop):
                if S.entries[i][j] != ident.entries[i][j]:
                    raise InternalInconsistency("averaging output is not unipotent")
    for name, c, e in N.action_items():
        if N.maps[name] @ S != S.substitute(c, e) @ R.maps[name]:
            raise InternalInconsistency(
                f"averaging intertwiner fails at {name!r}")
    return S


# ---------------------------------------------------------------------------
# residual constant representations per degree block
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualRep:
    """Constant matrices after dividing a degree block by its reference
    scalar cocycle.  mode is one of cyclic / klein_even / klein_lift;
    for klein_lift the keys are the lift representatives I, A1, A2, A1A2
    and the center acts by -1."""
    mode: str
    group: GroupSpec
    degree: int
    size: int
    mats: dict
    conductor: int


_LIFT_REPRESENTATIVE = {"e": "I", "a1": "A1", "a2": "A2", "a1a2": "A1A2"}


def reference_scalars(G: GroupSpec, d: int, conductor: int):
    """The fixed reference scalar cocycle on O(d): the canonical cyclic,
    Klein-even, or Klein-lift structure, as 1x1 Laurent polynomials."""
    if G.kind == "cyclic":
        one = LaurentPoly.const(conductor, 1)
        return {g.name: one for g in elements(G)}
    if d % 2 == 0:
        src = canonical_klein_even(d)
        return {name: mat.entries[0][0].embed(conductor)
                for name, mat in src.maps.items()}
    src = canonical_klein_lift(d)
    return {name: mat.entries[0][0].embed(conductor)
            for name, mat in src.maps.items()}


def extract_residual_rep(R: ModelStructure, d: int) -> ResidualRep:
    """Factor the degree-d diagonal block as reference scalars times
    constant matrices."""
    ranges = [rg for rg in _block_ranges(R.degrees) if rg[0] == d]
    if not ranges:
        raise ValueError(f"degree {d} does not occur in the model")
    _, start, stop = ranges[0]
    size = stop - start
    G = R.group
    nu = reference_scalars(G, d, R.conductor)
    mode = ("cyclic" if G.kind == "cyclic"
            else "klein_even" if d % 2 == 0 else "klein_lift")
    mats = {}
    for g in elements(G):
        block = [[R.maps[g.name].entries[i][j] for j in range(start, stop)]
                 for i in range(start, stop)]
        scalar = nu[g.name if mode != "klein_lift"
                    else _LIFT_REPRESENTATIVE[g.name]]
        grid = []
        for row in block:
            out = []
            for p in row:
                q = p.divexact(scalar) if not p.is_zero() \
                    else LaurentPoly.zero(R.conductor)
                if not q.is_constant():
                    raise FactorizationFailure(
                        f"degree-{d} block at {g.name!r} is not scalar times constant")
                out.append(q.coeff(0))
            grid.append(out)
        key = g.name if mode != "klein_lift" else _LIFT_REPRESENTATIVE[g.name]
        mats[key] = grid
    return ResidualRep(mode, G, d, size, mats, R.conductor)


def _check_rep_relations(rho: ResidualRep):
    from .linalg import identity_const, mat_mul_const
    cond, n = rho.conductor, rho.size
    ident = identity_const(n, cond)
    if rho.mode == "klein_lift":
        a1, a2 = rho.mats["A1"], rho.mats["A2"]
        if mat_mul_const(a1, a1, cond) != ident or \
           mat_mul_const(a2, a2, cond) != ident:
            raise RelationViolation("lift generators must square to the identity")
        p = mat_mul_const(a1, a2, cond)
        q = mat_mul_const(a2, a1, cond)
        if p != [[-x for x in row] for row in q]:
            raise RelationViolation("lift generators must anticommute")
        if rho.mats["A1A2"] != p:
            raise RelationViolation("lift product matrix is inconsistent")
        return
    G = rho.group
    for g in elements(G):
        for h in elements(G):
            gh = multiply(G, g, h).name
            if mat_mul_const(rho.mats[g.name], rho.mats[h.name], cond) \
                    != rho.mats[gh]:
                raise RelationViolation(
                    f"constant matrices are not a representation at ({g.name}, {h.name})")


def rep_decompose(rho: ResidualRep):
    """Split a residual representation.

    cyclic / klein_even: returns [(Character, eigenvector)] in canonical
    character order, echelon basis within each eigenspace.
    klein_lift: returns [(v_j, rho(A2) v_j)] with v_j an echelon basis of
    the +1 eigenspace of rho(A1)."""
    _check_rep_relations(rho)
    cond, n = rho.conductor, rho.size
    G = rho.group
    if rho.mode == "klein_lift":
        plus = eigenspace(rho.mats["A1"], CycNum.one(cond), cond)
        minus = eigenspace(rho.mats["A1"], CycNum.rational(cond, -1), cond)
        if len(plus) != len(minus) or len(plus) + len(minus) != n:
            raise RelationViolation(
                f"eigenspace dimensions {len(plus)}/{len(minus)} do not pair up")
        pairs = [(v, tuple(mat_vec_const(rho.mats["A2"], list(v), cond)))
                 for v in plus]
        # the pair vectors must span: their matrix has a nonzero determinant
        from .linalg import det_const
        cols = []
        for v, av in pairs:
            cols.append(av)
            cols.append(v)
        grid = [[cols[j][i] for j in range(n)] for i in range(n)]
        if det_const(grid, cond).is_zero():
            raise RelationViolation("eigenvector pairs do not form a basis")
        return pairs
    out = []
    if G.kind == "cyclic":
        gen = rho.mats["g"] if G.n > 1 else rho.mats["e"]
        for chi in characters(G):
            lam = root_of_unity(G.n, chi.index).embed(cond)
            for v in eigenspace(gen, lam, cond):
                out.append((chi, v))
    else:
        for chi in characters(G):
            s1 = CycNum.rational(cond, chi.signs[0])
            s2 = CycNum.rational(cond, chi.signs[1])
            rows = []
            for mat, s in ((rho.mats["a1"], s1), (rho.mats["a2"], s2)):
                for i in range(n):
                    rows.append([mat[i][j] - s if i == j else mat[i][j]
                                 for j in range(n)])
            for v in kernel_dense(rows, n, cond):
                out.append((chi, v))
    if len(out) != n:
        raise RelationViolation(
            f"character eigenvectors span {len(out)} of {n} dimensions")
    return out


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

def _char_key(chi: Character) -> int:
    if chi.group.kind == "cyclic":
        return chi.index
    return list(characters(chi.group)).index(chi)


@dataclass(frozen=True)
class DecompositionCertificate:
    """Block data of an equivariant splitting plus the change of frame
    from the canonical model to the classified bundle.

    even_blocks: (degree, character) line blocks (for cyclic groups all
    blocks live here regardless of parity); odd_blocks: degrees of
    Klein rank-2 pair blocks, each counting 2 toward the rank."""
    group: GroupSpec
    even_blocks: tuple
    odd_blocks: tuple
    change_of_frame: LaurentMatrix
    conductor: int

    def __post_init__(self):
        even = tuple(sorted(self.even_blocks,
                            key=lambda b: (-b[0], _char_key(b[1]))))
        odd = tuple(sorted(self.odd_blocks, reverse=True))
        object.__setattr__(self, "even_blocks", even)
        object.__setattr__(self, "odd_blocks", odd)
        if self.group.kind == "cyclic":
            if odd:
                raise ValueError("cyclic certificates have no pair blocks")
        else:
            if any(d % 2 for d, _ in even):
                raise ValueError("Klein line blocks must have even degree")
            if any(d % 2 == 0 for d in odd):
                raise ValueError("Klein pair blocks must have odd degree")
        r = self.rank
        if self.change_of_frame.rows != r or self.change_of_frame.cols != r:
            raise ValueError(
                f"change of frame is {self.change_of_frame.rows}x"
                f"{self.change_of_frame.cols}, blocks account for rank {r}")

    @property
    def rank(self) -> int:
        return len(self.even_blocks) + 2 * len(self.odd_blocks)

    def block_sequence(self):
        """All blocks merged by degree descending; evens of one degree in
        character order, then pair blocks."""
        items = [("even", d, chi) for d, chi in self.even_blocks]
        items += [("odd", d, None) for d in self.odd_blocks]
        items.sort(key=lambda it: (-it[1], 0 if it[0] == "even" else 1,
                                   _char_key(it[2]) if it[2] else 0))
        return items

    def model_degrees(self):
        out = []
        for kind, d, _ in self.block_sequence():
            out.extend([d] if kind == "even" else [d, d])
        return tuple(out)

    def block_data(self):
        """Hashable summary for comparisons up to the canonical sort."""
        return (self.group,
                tuple((d, _char_key(chi)) for d, chi in self.even_blocks),
                self.odd_blocks)


def build_structure(cert: DecompositionCertificate,
                    target=None) -> EquivariantStructure:
    """Assemble the direct sum of canonical blocks twisted per the
    certificate; with a target bundle, conjugate along the certificate's
    change of frame onto it."""
    G = cert.group
    parts = []
    for kind, d, chi in cert.block_sequence():
        if kind == "odd":
            parts.append(canonical_klein_pair(d))
        else:
            base = (canonical_cyclic(G.n, d) if G.kind == "cyclic"
                    else canonical_klein_even(d))
            parts.append(twist_by_character(base, chi))
    built = parts[0]
    for p in parts[1:]:
        built = direct_sum_structures(built, p)
    built = embed_structure(built, cert.conductor)
    if target is None:
        return built
    if target.rank != cert.rank:
        raise ShapeMismatch(
            f"certificate rank {cert.rank} vs target rank {target.rank}")
    if target.conductor != cert.conductor:
        raise ShapeMismatch(
            f"certificate conductor {cert.conductor} vs target {target.conductor}")
    F = cert.change_of_frame
    if not regular_invertible_at(F, "zero"):
        raise ShapeMismatch("change of frame is not regular+invertible at 0")
    corrected = (target.inverse_transition() @ F @ built.bundle.transition)
    if not regular_invertible_at(corrected, "infinity"):
        raise ShapeMismatch("change of frame fails the infinity certificate")
    return transport_structure(built, F, target)


def verify_certificate_report(cert: DecompositionCertificate,
                              S: EquivariantStructure):
    """All reasons the certificate fails to reproduce S (empty = verified)."""
    reasons = []
    if S.lift:
        return ["certificates describe genuine structures"]
    if cert.group != S.group:
        return [f"certificate group {cert.group} vs structure group {S.group}"]
    if cert.rank != S.bundle.rank:
        return [f"rank accounting {cert.rank} != bundle rank {S.bundle.rank}"]
    if cert.conductor != S.conductor:
        return [f"certificate conductor {cert.conductor} vs {S.conductor}"]
    built = build_structure(cert)
    F = cert.change_of_frame
    if not regular_invertible_at(F, "zero"):
        reasons.append("change of frame not regular+invertible at 0")
    corrected = S.bundle.inverse_transition() @ F @ built.bundle.transition
    if not regular_invertible_at(corrected, "infinity"):
        reasons.append("change of frame fails the infinity certificate")
    if reasons:
        return reasons
    for name, c, e in S.action_items():
        lhs = F.substitute(c, e) @ built.maps[name]
        rhs = S.maps[name] @ F
        if lhs != rhs:
            reasons.append(f"conjugated built structure differs at {name!r}")
    return reasons


def verify_certificate(cert: DecompositionCertificate,
                       S: EquivariantStructure) -> bool:
    return not verify_certificate_report(cert, S)


# ---------------------------------------------------------------------------
# the pipeline
# ---------------------------------------------------------------------------

def decompose(S: EquivariantStructure, seed: int = 0) -> DecompositionCertificate:
    """Classify a validated genuine structure; the returned certificate
    verifies against S exactly."""
    if S.lift:
        raise InvalidStructure("decompose expects a genuine structure")
    if not validate_structure(S):
        raise InvalidStructure("decompose expects a validated structure")
    iso = model_isomorphism(S.bundle, seed=seed)
    N = pullback_structure(S, iso)
    R = block_diagonal_part(N)
    Sav = averaging_intertwiner(N, R)
    even_blocks = []
    odd_blocks = []
    col_blocks = []
    for (d, start, stop) in _block_ranges(N.degrees):
        rr = extract_residual_rep(R, d)
        if rr.mode == "klein_lift":
            pairs = rep_decompose(rr)
            odd_blocks.extend([d] * len(pairs))
            cols = []
            for v, av in pairs:
                cols.append(av)
                cols.append(v)
            col_blocks.append(cols)
        else:
            eig = rep_decompose(rr)
            even_blocks.extend((d, chi) for chi, _ in eig)
            col_blocks.append([v for _, v in eig])
    P_blocks = []
    for cols in col_blocks:
        n = len(cols)
        grid = [[cols[j][i] for j in range(n)] for i in range(n)]
        P_blocks.append(LaurentMatrix.from_const(N.conductor, grid))
    P = LaurentMatrix.block_diag(P_blocks)
    frame = iso.psi @ Sav @ P
    cert = DecompositionCertificate(group=S.group,
                                    even_blocks=tuple(even_blocks),
                                    odd_blocks=tuple(odd_blocks),
                                    change_of_frame=frame,
                                    conductor=S.conductor)
    report = verify_certificate_report(cert, S)
    if report:
        raise InternalInconsistency(
            "decompose produced a non-verifying certificate: " + "; ".join(report))
    return cert
