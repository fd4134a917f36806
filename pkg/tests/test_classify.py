from fractions import Fraction
from random import Random

import pytest

from eqbundles.bundle import line_bundle, model_bundle, model_isomorphism, splitting_type
from eqbundles.classify import (DecompositionCertificate, ModelStructure,
                                averaging_intertwiner, block_diagonal_part,
                                build_structure, decompose, extract_residual_rep,
                                pullback_structure, rep_decompose,
                                verify_certificate, verify_certificate_report)
from eqbundles.cyclotomic import CycNum, root_of_unity
from eqbundles.equivariant import (EquivariantStructure, canonical_cyclic,
                                   canonical_klein_even, canonical_klein_pair,
                                   conjugate_structure, direct_sum_structures,
                                   transport_structure, twist_by_character,
                                   validate_structure)
from eqbundles.errors import (InvalidStructure, NotBlockDiagonalPart,
                              RelationViolation)
from eqbundles.group import characters, cyclic, klein
from eqbundles.laurent import LaurentMatrix, LaurentPoly
from eqbundles.linalg import mat_mul_const
from eqbundles.randgen import (random_certificate,
                               random_model_automorphism, random_unimodular)

from conftest import M


# -- pullback -----------------------------------------------------------------

def test_pullback_along_identity_is_identity():
    S = canonical_klein_pair(-1)
    iso = model_isomorphism(S.bundle)
    assert iso.psi == LaurentMatrix.identity(4, 2)
    N = pullback_structure(S, iso)
    assert N.maps["a1"] == S.maps["a1"]
    assert N.maps["a2"] == S.maps["a2"]


def test_pullback_cocycle_holds():
    # rank-2 cyclic(2) structure on diag(z, z) with constant blocks
    G = cyclic(2)
    E = model_bundle(2, [1, 1])
    Ng = M([["1", "1"], ["0", "-1"]], 2)
    S = EquivariantStructure(E, G, {"e": LaurentMatrix.identity(2, 2), "g": Ng})
    assert validate_structure(S)
    iso = model_isomorphism(E)
    N = pullback_structure(S, iso)
    for n1, c1, e1 in N.action_items():
        for n2, c2, e2 in N.action_items():
            prod = N.product_name(n1, n2)
            assert N.maps[prod] == N.maps[n1].substitute(c2, e2) @ N.maps[n2]


def test_pullback_rejects_wrong_frame():
    # a deliberately wrong model isomorphism (swapped columns) hides the
    # degree ordering, so the triangularity guard must fire
    from eqbundles.bundle import ModelIso, SplittingType
    from eqbundles.errors import TriangularityViolation
    G = cyclic(2)
    E = model_bundle(2, [1, 0])
    Ng = M([["1", "3"], ["0", "-1"]], 2)
    S = EquivariantStructure(E, G, {"e": LaurentMatrix.identity(2, 2), "g": Ng})
    assert validate_structure(S)
    swap = M([["0", "1"], ["1", "0"]], 2)
    bogus = ModelIso(model=SplittingType((1, 0)), psi=swap, bundle=E)
    with pytest.raises(TriangularityViolation):
        pullback_structure(S, bogus)


def test_pullback_triangularity_on_mixed_degrees():
    S = direct_sum_structures(canonical_klein_even(2), canonical_klein_pair(-1))
    U = random_model_automorphism(Random(3), 4, (2, -1, -1))
    S2 = conjugate_structure(S, U)
    iso = model_isomorphism(S2.bundle)
    N = pullback_structure(S2, iso)
    for name, mat in N.maps.items():
        for i in range(3):
            for j in range(3):
                if N.degrees[i] < N.degrees[j]:
                    assert mat.entries[i][j].is_zero()


# -- averaging -----------------------------------------------------------------

def _cyclic2_triangular_model(q0):
    """Cocycle on diag(z, 1) over cyclic(2): N_g = [[1, q0], [0, -1]]."""
    G = cyclic(2)
    zero = LaurentPoly.zero(2)
    one = LaurentPoly.const(2, 1)
    Ng = LaurentMatrix(2, [[one, LaurentPoly.const(2, q0)],
                           [zero, LaurentPoly.const(2, -1)]])
    maps = {"e": LaurentMatrix.identity(2, 2), "g": Ng}
    return ModelStructure(G, (1, 0), maps, 2)


def test_averaging_identity_when_block_diagonal():
    S = canonical_klein_pair(-1)
    iso = model_isomorphism(S.bundle)
    N = pullback_structure(S, iso)
    R = block_diagonal_part(N)
    assert averaging_intertwiner(N, R) == LaurentMatrix.identity(4, 2)


def test_averaging_halves_planted_off_diagonal_entry():
    # solved by hand: S = (1/2)(Id + N_g^(-1) R_g) = [[1, -q0/2], [0, 1]]
    N = _cyclic2_triangular_model(Fraction(3))
    R = block_diagonal_part(N)
    S = averaging_intertwiner(N, R)
    expected = LaurentMatrix(2, [
        [LaurentPoly.const(2, 1), LaurentPoly.const(2, Fraction(-3, 2))],
        [LaurentPoly.zero(2), LaurentPoly.const(2, 1)]])
    assert S == expected
    for name, c, e in N.action_items():
        assert N.maps[name] @ S == S.substitute(c, e) @ R.maps[name]


def test_averaging_rejects_wrong_diagonal():
    N = _cyclic2_triangular_model(Fraction(1))
    R = block_diagonal_part(N)
    bad = ModelStructure(R.group, R.degrees,
                         {"e": R.maps["e"], "g": R.maps["e"]}, R.conductor)
    with pytest.raises(NotBlockDiagonalPart):
        averaging_intertwiner(N, bad)


def test_averaging_unipotent_on_fuzz():
    rng = Random(31)
    for _ in range(10):
        G = klein() if rng.random() < 0.5 else cyclic(rng.randint(1, 4))
        cert = random_certificate(rng, G, 3, -2, 2)
        S0 = build_structure(cert)
        U = random_model_automorphism(rng, S0.conductor,
                                      splitting_type(S0.bundle).degrees)
        S = conjugate_structure(S0, U)
        iso = model_isomorphism(S.bundle)
        N = pullback_structure(S, iso)
        R = block_diagonal_part(N)
        Sav = averaging_intertwiner(N, R)  # checks unipotence + intertwining
        assert Sav.rows == S.bundle.rank


# -- residual representations -----------------------------------------------------

def test_extract_reference_times_identity():
    S = direct_sum_structures(canonical_klein_even(2), canonical_klein_even(2))
    iso = model_isomorphism(S.bundle)
    R = block_diagonal_part(pullback_structure(S, iso))
    rr = extract_residual_rep(R, 2)
    ident = [[CycNum.one(4), CycNum.zero(4)], [CycNum.zero(4), CycNum.one(4)]]
    assert rr.mode == "klein_even"
    assert rr.mats["a1"] == ident and rr.mats["a2"] == ident


def test_extract_cyclic_constant_block():
    G = cyclic(2)
    E = model_bundle(2, [0, 0])
    Ng = M([["1", "0"], ["0", "-1"]], 2)
    S = EquivariantStructure(E, G, {"e": LaurentMatrix.identity(2, 2), "g": Ng})
    R = block_diagonal_part(pullback_structure(S, model_isomorphism(E)))
    rr = extract_residual_rep(R, 0)
    assert rr.mode == "cyclic"
    assert rr.mats["g"] == [[CycNum.one(2), CycNum.zero(2)],
                            [CycNum.zero(2), CycNum.rational(2, -1)]]


def test_extract_klein_pair_anticommuting():
    S = canonical_klein_pair(-1)
    R = block_diagonal_part(pullback_structure(S, model_isomorphism(S.bundle)))
    rr = extract_residual_rep(R, -1)
    assert rr.mode == "klein_lift"
    a1, a2 = rr.mats["A1"], rr.mats["A2"]
    assert a1 == [[CycNum.rational(4, -1), CycNum.zero(4)],
                  [CycNum.zero(4), CycNum.one(4)]]
    assert a2 == [[CycNum.zero(4), CycNum.one(4)],
                  [CycNum.one(4), CycNum.zero(4)]]
    prod = mat_mul_const(a1, a2, 4)
    anti = mat_mul_const(a2, a1, 4)
    assert prod == [[-x for x in row] for row in anti]


def test_rep_decompose_abelian_diagonal():
    from eqbundles.classify import ResidualRep
    G = cyclic(3)
    z = root_of_unity(3, 1)
    z2 = root_of_unity(3, 2)
    zero = CycNum.zero(3)
    mats = {"e": [[CycNum.one(3), zero], [zero, CycNum.one(3)]],
            "g": [[z, zero], [zero, z2]],
            "g^2": [[z2, zero], [zero, z]]}
    rr = ResidualRep("cyclic", G, 0, 2, mats, 3)
    out = rep_decompose(rr)
    assert [chi.index for chi, _ in out] == [1, 2]


def test_rep_decompose_klein_lift_single_pair():
    from eqbundles.classify import ResidualRep
    zero, one, minus = CycNum.zero(4), CycNum.one(4), CycNum.rational(4, -1)
    a1 = [[minus, zero], [zero, one]]
    a2 = [[zero, one], [one, zero]]
    a1a2 = mat_mul_const(a1, a2, 4)
    rr = ResidualRep("klein_lift", klein(), -1, 2,
                     {"I": [[one, zero], [zero, one]], "A1": a1, "A2": a2,
                      "A1A2": a1a2}, 4)
    pairs = rep_decompose(rr)
    assert len(pairs) == 1
    v, av = pairs[0]
    assert v == (zero, one)      # e2 spans the +1 eigenspace
    assert av == (one, zero)     # A2 e2 = e1


def test_rep_decompose_klein_lift_two_pairs():
    from eqbundles.classify import ResidualRep
    zero, one, minus = CycNum.zero(4), CycNum.one(4), CycNum.rational(4, -1)

    def two_copies(block):
        g = [[zero] * 4 for _ in range(4)]
        for bi in range(2):
            for i in range(2):
                for j in range(2):
                    g[2 * bi + i][2 * bi + j] = block[i][j]
        return g

    a1 = two_copies([[minus, zero], [zero, one]])
    a2 = two_copies([[zero, one], [one, zero]])
    rr = ResidualRep("klein_lift", klein(), 1, 4,
                     {"I": two_copies([[one, zero], [zero, one]]),
                      "A1": a1, "A2": a2, "A1A2": mat_mul_const(a1, a2, 4)}, 4)
    pairs = rep_decompose(rr)
    assert len(pairs) == 2


def test_rep_decompose_rejects_broken_relations():
    from eqbundles.classify import ResidualRep
    zero, one = CycNum.zero(4), CycNum.one(4)
    two = CycNum.rational(4, 2)
    bad = ResidualRep("klein_lift", klein(), -1, 1,
                      {"I": [[one]], "A1": [[two]], "A2": [[one]],
                       "A1A2": [[two]]}, 4)
    with pytest.raises(RelationViolation):
        rep_decompose(bad)


# -- decompose / build / verify ------------------------------------------------------

def test_decompose_canonical_line():
    for n in (2, 3):
        for d in (-2, 0, 3):
            cert = decompose(canonical_cyclic(n, d))
            assert cert.odd_blocks == ()
            assert [b[0] for b in cert.even_blocks] == [d]
            assert cert.even_blocks[0][1].is_trivial()


def test_decompose_klein_pair():
    S = canonical_klein_pair(-1)
    cert = decompose(S)
    assert cert.even_blocks == ()
    assert cert.odd_blocks == (-1,)
    assert verify_certificate(cert, S)


def test_decompose_klein_even_sum():
    S = direct_sum_structures(canonical_klein_even(2), canonical_klein_even(0))
    cert = decompose(S)
    assert cert.odd_blocks == ()
    assert [(d, chi.label) for d, chi in cert.even_blocks] == \
        [(2, "chi_++"), (0, "chi_++")]
    assert verify_certificate(cert, S)


def test_decompose_requires_validity():
    from eqbundles.laurent import parse_laurent
    E = line_bundle(4, -1)
    mk = lambda s: LaurentMatrix(4, [[parse_laurent(s, 4)]])
    forged = EquivariantStructure(E, klein(), {
        "e": mk("1"), "a1": mk("1"), "a2": mk("z"), "a1a2": mk("z")})
    with pytest.raises(InvalidStructure):
        decompose(forged)


def test_build_structure_blocks():
    G = cyclic(4)
    chi2 = characters(G)[2]
    cert = DecompositionCertificate(
        group=G, even_blocks=((1, chi2),), odd_blocks=(),
        change_of_frame=LaurentMatrix.identity(4, 1), conductor=4)
    S = build_structure(cert)
    assert validate_structure(S)
    assert S.maps["g"] == M([["-1"]], 4)

    K = klein()
    certk = DecompositionCertificate(
        group=K, even_blocks=(), odd_blocks=(-1,),
        change_of_frame=LaurentMatrix.identity(4, 2), conductor=4)
    Sk = build_structure(certk)
    assert Sk == canonical_klein_pair(-1)


def test_roundtrip_on_random_certificates():
    rng = Random(41)
    for _ in range(15):
        G = klein() if rng.random() < 0.5 else cyclic(rng.randint(1, 4))
        cert = random_certificate(rng, G, 4, -3, 3)
        S0 = build_structure(cert)
        U = random_model_automorphism(rng, S0.conductor,
                                      splitting_type(S0.bundle).degrees)
        S = conjugate_structure(S0, U)
        out = decompose(S)
        assert out.block_data() == cert.block_data()
        assert verify_certificate(out, S)


def test_roundtrip_off_the_model_bundle():
    # transport onto a non-diagonal bundle through a planted frame change
    rng = Random(42)
    for _ in range(6):
        G = klein() if rng.random() < 0.5 else cyclic(rng.randint(2, 3))
        cert = random_certificate(rng, G, 3, -2, 2)
        S0 = build_structure(cert)
        r = S0.bundle.rank
        m = S0.conductor
        P = random_unimodular(rng, m, r, var_sign=1, ops=2)
        Q = random_unimodular(rng, m, r, var_sign=-1, ops=2)
        from eqbundles.bundle import make_bundle
        E = make_bundle(P @ S0.bundle.transition @ Q)
        S = transport_structure(S0, P, E)
        assert validate_structure(S)
        out = decompose(S)
        assert out.block_data() == cert.block_data()
        assert verify_certificate(out, S)


def test_verify_rejects_mutations():
    S = twist_by_character(canonical_cyclic(4, 1), characters(cyclic(4))[2])
    cert = decompose(S)
    assert verify_certificate(cert, S)
    d, chi = cert.even_blocks[0]
    # degree off by one: the frame certificate fails
    shifted = DecompositionCertificate(
        group=cert.group, even_blocks=((d + 1, chi),), odd_blocks=(),
        change_of_frame=cert.change_of_frame, conductor=cert.conductor)
    assert not verify_certificate(shifted, S)
    assert any("certificate" in r or "frame" in r
               for r in verify_certificate_report(shifted, S))
    # swapped character: the matrices differ element by element
    swapped = DecompositionCertificate(
        group=cert.group, even_blocks=((d, characters(cyclic(4))[1]),),
        odd_blocks=(), change_of_frame=cert.change_of_frame,
        conductor=cert.conductor)
    assert not verify_certificate(swapped, S)


def test_certificate_constructor_rejects_bad_parity():
    K = klein()
    with pytest.raises(ValueError):
        DecompositionCertificate(group=K, even_blocks=((1, characters(K)[0]),),
                                 odd_blocks=(),
                                 change_of_frame=LaurentMatrix.identity(4, 1),
                                 conductor=4)
    with pytest.raises(ValueError):
        DecompositionCertificate(group=K, even_blocks=(), odd_blocks=(0,),
                                 change_of_frame=LaurentMatrix.identity(4, 2),
                                 conductor=4)
    with pytest.raises(ValueError):
        DecompositionCertificate(group=cyclic(2), even_blocks=(),
                                 odd_blocks=(1,),
                                 change_of_frame=LaurentMatrix.identity(2, 2),
                                 conductor=2)


def test_high_multiplicity_blocks():
    K = klein()
    triple = DecompositionCertificate(
        group=K, even_blocks=(), odd_blocks=(1, 1, 1),
        change_of_frame=LaurentMatrix.identity(4, 6), conductor=4)
    S0 = build_structure(triple)
    U = random_model_automorphism(Random(5), 4,
                                  splitting_type(S0.bundle).degrees)
    S = conjugate_structure(S0, U)
    out = decompose(S)
    assert out.odd_blocks == (1, 1, 1) and out.even_blocks == ()
    assert verify_certificate(out, S)

    chars = characters(K)
    full = DecompositionCertificate(
        group=K, even_blocks=tuple((2, c) for c in chars), odd_blocks=(-3,),
        change_of_frame=LaurentMatrix.identity(4, 6), conductor=4)
    S0 = build_structure(full)
    U = random_model_automorphism(Random(6), 4,
                                  splitting_type(S0.bundle).degrees)
    S = conjugate_structure(S0, U)
    out = decompose(S)
    assert out.block_data() == full.block_data()
    assert verify_certificate(out, S)


def test_decompose_is_deterministic():
    from eqbundles.serialize import render_document
    cert = random_certificate(Random(8), klein(), 4, -3, 3)
    S0 = build_structure(cert)
    U = random_model_automorphism(Random(9), 4,
                                  splitting_type(S0.bundle).degrees)
    S = conjugate_structure(S0, U)
    assert render_document(decompose(S, seed=0)) == \
        render_document(decompose(S, seed=0))


def test_shape_law_on_fuzz():
    rng = Random(43)
    for _ in range(10):
        cert = random_certificate(rng, klein(), 4, -3, 3)
        S = build_structure(cert)
        out = decompose(S)
        assert len(out.even_blocks) + 2 * len(out.odd_blocks) == S.bundle.rank
        assert all(d % 2 == 0 for d, _ in out.even_blocks)
        assert all(d % 2 == 1 for d in out.odd_blocks)
