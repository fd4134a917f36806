from random import Random

import pytest

from eqbundles.bundle import line_bundle, model_bundle
from eqbundles.cyclotomic import CycNum, root_of_unity
from eqbundles.equivariant import (EquivariantStructure, automorphism_sections,
                                   canonical_cyclic, canonical_klein_even,
                                   canonical_klein_lift, canonical_klein_pair,
                                   canonical_structure, canonical_tangent,
                                   central_sign, conjugate_structure,
                                   descend_lift, direct_sum_structures,
                                   existence, is_bundle_map, structure_quotient,
                                   structures_equivalent, twist_by_character,
                                   validate_structure, validation_report)
from eqbundles.errors import MissingElement, NoSuchStructure, NotComparable
from eqbundles.group import Character, characters, cyclic, element_by_name, klein
from eqbundles.laurent import LaurentMatrix

from conftest import M


def _klein_line_structure(d, n_a1, n_a2, n_a1a2, conductor=4):
    maps = {"e": M([["1"]], conductor), "a1": M([[n_a1]], conductor),
            "a2": M([[n_a2]], conductor), "a1a2": M([[n_a1a2]], conductor)}
    return EquivariantStructure(line_bundle(conductor, d), klein(), maps)


# -- is_bundle_map -------------------------------------------------------------

def test_bundle_map_tautological_swap():
    E = line_bundle(4, -1)
    a2 = element_by_name(klein(), "a2")
    assert is_bundle_map(E, a2, M([["z"]], 4))


def test_bundle_map_tangent_chain_rule():
    E = line_bundle(4, 2)
    a2 = element_by_name(klein(), "a2")
    assert is_bundle_map(E, a2, M([["-z^-2"]], 4))


def test_bundle_map_rejects_vanishing_at_zero():
    E = line_bundle(4, -1)
    e = element_by_name(klein(), "e")
    assert not is_bundle_map(E, e, M([["z"]], 4))


def test_bundle_map_accessor():
    S = canonical_tangent()
    bm = S.bundle_map("a2")
    assert bm.gamma.name == "a2"
    assert bm.matrix == M([["-z^-2"]], 4)
    assert bm.is_valid_over(S.bundle)


# -- validation -----------------------------------------------------------------

@pytest.mark.parametrize("G", [cyclic(1), cyclic(3), klein()])
def test_trivial_structure_validates(G):
    from eqbundles.group import elements
    E = line_bundle(G.conductor, 0)
    one = LaurentMatrix.identity(G.conductor, 1)
    maps = {g.name: one for g in elements(G)}
    S = EquivariantStructure(E, G, maps)
    assert validate_structure(S)


def test_tautological_cyclic_action_validates():
    S = canonical_cyclic(3, -1)
    assert S.maps["g"] == LaurentMatrix.identity(3, 1)
    assert validate_structure(S)


def test_forged_cocycle_witness_fails():
    S = _klein_line_structure(-1, "1", "z", "z")
    # the (a1, a2) order is consistent ...
    lhs = S.maps["a1"].substitute(CycNum.one(4), -1) @ S.maps["a2"]
    assert lhs == M([["z"]], 4)
    # ... but the (a2, a1) order yields -z against the stored z
    minus_one = CycNum.rational(4, -1)
    rhs = S.maps["a2"].substitute(minus_one, 1) @ S.maps["a1"]
    assert rhs == M([["-z"]], 4)
    assert rhs != S.maps["a1a2"]
    assert not validate_structure(S)
    assert any("cocycle" in p for p in validation_report(S))


def test_missing_element_raises():
    E = line_bundle(4, 0)
    with pytest.raises(MissingElement):
        EquivariantStructure(E, klein(), {"e": LaurentMatrix.identity(4, 1)})


# -- canonical structures ---------------------------------------------------------

def test_canonical_tangent_cocycle():
    S = canonical_tangent()
    assert S.maps["a1"] == M([["-1"]], 4)
    assert S.maps["a2"] == M([["-z^-2"]], 4)
    assert S.maps["a1a2"] == M([["z^-2"]], 4)
    # N_a2(a2.z) * N_a2(z) = (-z^2)(-z^-2) = 1
    prod = S.maps["a2"].substitute(CycNum.one(4), -1) @ S.maps["a2"]
    assert prod == LaurentMatrix.identity(4, 1)
    assert validate_structure(S)


def test_canonical_klein_pair():
    S = canonical_klein_pair(-1)
    assert S.maps["a1"] == M([["-1", "0"], ["0", "1"]], 4)
    assert S.maps["a2"] == M([["0", "z"], ["z", "0"]], 4)
    assert validate_structure(S)
    # the two lift cocycle orders agree after pairing:
    # N_a1(a2.z) N_a2(z) = N_a2(a1.z) N_a1(z)
    one, minus = CycNum.one(4), CycNum.rational(4, -1)
    lhs = S.maps["a1"].substitute(one, -1) @ S.maps["a2"]
    rhs = S.maps["a2"].substitute(minus, 1) @ S.maps["a1"]
    assert lhs == rhs == S.maps["a1a2"]


def test_canonical_klein_odd_single_is_obstructed():
    with pytest.raises(NoSuchStructure):
        canonical_klein_even(-1)
    with pytest.raises(NoSuchStructure):
        canonical_structure(klein(), [-1])
    with pytest.raises(NoSuchStructure):
        canonical_structure(klein(), [3, 1, 1])


def test_canonical_lift_signs():
    for d in (-3, -1, 1, 3, 5):
        S = canonical_klein_lift(d)
        assert validate_structure(S)
        assert central_sign(S) == -1
    for d in (-2, 0, 2):
        S = canonical_klein_lift(d)
        assert validate_structure(S)
        assert central_sign(S) == 1
        assert validate_structure(descend_lift(S))


def test_descend_requires_trivial_center():
    with pytest.raises(NoSuchStructure):
        descend_lift(canonical_klein_lift(1))


def test_canonical_structure_assembles_sums():
    S = canonical_structure(klein(), [2, -1, -1, 0])
    assert S.bundle.rank == 4
    assert validate_structure(S)
    S2 = canonical_structure(cyclic(3), [1, 0, -2])
    assert validate_structure(S2)


# -- twists and quotients -----------------------------------------------------------

def test_twist_by_trivial_character_is_identity():
    S = canonical_tangent()
    T = twist_by_character(S, characters(klein())[0])
    assert T == S


def test_twist_cyclic2_on_trivial_bundle():
    S = canonical_cyclic(2, 0)
    chi1 = characters(cyclic(2))[1]
    T = twist_by_character(S, chi1)
    assert T.maps["g"] == M([["-1"]], 2)
    assert validate_structure(T)


def test_twist_tangent_by_sign_character():
    S = canonical_tangent()
    chi = Character(klein(), signs=(-1, 1))
    T = twist_by_character(S, chi)
    assert T.maps["a1"] == M([["1"]], 4)
    assert T.maps["a2"] == M([["-z^-2"]], 4)
    assert validate_structure(T)


def test_structure_quotient_roundtrip():
    S = canonical_cyclic(4, 1)
    assert structure_quotient(S, S).is_trivial()
    for chi in characters(cyclic(4)):
        T = twist_by_character(S, chi)
        assert structure_quotient(T, S) == chi
        assert twist_by_character(S, structure_quotient(T, S)) == T


def test_structure_quotient_sign_example():
    S1 = canonical_cyclic(2, -1)
    S2 = twist_by_character(S1, characters(cyclic(2))[1])
    assert S2.maps["g"] == M([["-1"]], 2)
    assert structure_quotient(S2, S1) == characters(cyclic(2))[1]


def test_structure_quotient_not_comparable():
    with pytest.raises(NotComparable):
        structure_quotient(canonical_cyclic(2, 0), canonical_cyclic(2, 1))


def test_klein_even_torsor_roundtrip():
    S = canonical_klein_even(-2)
    for chi in characters(klein()):
        T = twist_by_character(S, chi)
        assert validate_structure(T)
        assert structure_quotient(T, S) == chi
        assert twist_by_character(S, chi) == T


def test_descended_lift_is_a_character_twist_of_the_even_canonical():
    # the two canonical families on O(2m) differ by a sign character
    for d in (-4, -2, 0, 2, 4):
        descended = descend_lift(canonical_klein_lift(d))
        even = canonical_klein_even(d)
        chi = structure_quotient(descended, even)
        m = d // 2
        expect = (1, 1) if m % 2 == 0 else (-1, -1)
        assert chi.signs == expect
        assert twist_by_character(even, chi) == descended


def test_forged_triangular_cocycles_on_mixed_parity_bundle_fail():
    # on O(2) + O(1) every candidate map family within the forced
    # exponent windows must break validation (the odd summand obstructs)
    from eqbundles.laurent import LaurentPoly
    rng = Random(88)
    E = model_bundle(4, [2, 1])
    K = klein()
    for _ in range(25):
        da1 = [rng.choice([1, -1]), rng.choice([1, -1])]
        sa1 = CycNum.rational(4, rng.randint(-2, 2))
        na1 = LaurentMatrix(4, [
            [LaurentPoly.const(4, da1[0]), LaurentPoly(4, {rng.randint(0, 1): sa1})],
            [LaurentPoly.zero(4), LaurentPoly.const(4, da1[1])]])
        ca2 = [rng.choice([1, -1]), rng.choice([1, -1])]
        sa2 = CycNum.rational(4, rng.randint(-2, 2))
        na2 = LaurentMatrix(4, [
            [LaurentPoly(4, {-2: ca2[0]}), LaurentPoly(4, {rng.randint(-2, -1): sa2})],
            [LaurentPoly.zero(4), LaurentPoly(4, {-1: ca2[1]})]])
        na1a2 = na1.substitute(CycNum.one(4), -1) @ na2
        S = EquivariantStructure(E, K, {
            "e": LaurentMatrix.identity(4, 2),
            "a1": na1, "a2": na2, "a1a2": na1a2})
        assert not validate_structure(S)


def test_no_unit_monomial_cocycle_on_odd_line_bundles():
    # fuzz over unit-constant candidates: on O(d) with d odd, any maps of
    # the shape forced by the regularity checks (N_a1 = c1, N_a2 = c2 z^-d)
    # break the cocycle table, whatever the constants are
    from eqbundles.laurent import LaurentPoly
    rng = Random(77)
    K = klein()
    for d in (-3, -1, 1, 3):
        for _ in range(20):
            c1 = root_of_unity(4, rng.randrange(4))
            c2 = root_of_unity(4, rng.randrange(4)) * rng.choice([1, 2])
            maps = {
                "e": LaurentMatrix.identity(4, 1),
                "a1": LaurentMatrix(4, [[LaurentPoly.const(4, c1)]]),
                "a2": LaurentMatrix(4, [[LaurentPoly(4, {-d: c2})]]),
                "a1a2": LaurentMatrix(4, [[LaurentPoly(4, {-d: c1 * c2})]]),
            }
            S = EquivariantStructure(line_bundle(4, d), K, maps)
            assert not validate_structure(S)


def _constant_cyclic_structure(n, d, c):
    from eqbundles.laurent import LaurentPoly
    maps = {}
    for j in range(n):
        name = "e" if j == 0 else ("g" if j == 1 else f"g^{j}")
        maps[name] = LaurentMatrix(n, [[LaurentPoly.const(n, c ** j)]])
    return EquivariantStructure(line_bundle(n, d), cyclic(n), maps)


def test_valid_cyclic_constants_are_roots_of_unity():
    # on O(d) the valid constant generator values are exactly the n-th
    # roots of unity
    for n in (2, 3, 4):
        for d in (-2, 0, 1):
            candidates = []
            for k in range(n):
                candidates.append(root_of_unity(n, k))
                candidates.append(-root_of_unity(n, k))
            candidates.append(CycNum.rational(n, 2))
            valid = []
            for c in candidates:
                S = _constant_cyclic_structure(n, d, c)
                if validate_structure(S) and c not in valid:
                    valid.append(c)
            assert len(valid) == n
            assert all(c ** n == 1 for c in valid)


# -- existence ---------------------------------------------------------------------

def test_existence_parity():
    K = klein()
    for d in range(-6, 7):
        assert existence(line_bundle(4, d), K) == (d % 2 == 0)
    assert existence(model_bundle(4, [-1, -1]), K)
    assert not existence(model_bundle(4, [2, 1]), K)
    assert existence(model_bundle(4, [3, 3, 0]), K)
    for d in range(-4, 5):
        assert existence(line_bundle(6, d), cyclic(6))


# -- equivalence ----------------------------------------------------------------------

def test_equivalent_reflexive():
    S = canonical_klein_pair(-1)
    assert structures_equivalent(S, S)


def test_twisted_line_structures_not_equivalent():
    S = canonical_cyclic(3, 1)
    T = twist_by_character(S, characters(cyclic(3))[1])
    assert not structures_equivalent(S, T)


def test_conjugated_pair_structures_equivalent():
    S = canonical_klein_pair(-1)
    U = M([["0", "1"], ["1", "0"]], 4)
    T = conjugate_structure(S, U)
    assert validate_structure(T)
    assert structures_equivalent(S, T)


def test_pair_structure_character_twists_all_equivalent():
    # decided instance-wise: constant intertwiners exist for every sign
    # twist of the paired structure (antidiag(1,1) anticommutes with
    # diag(-1,1) and commutes with the swap, etc.)
    S = canonical_klein_pair(-1)
    for chi in characters(klein()):
        T = twist_by_character(S, chi)
        assert validate_structure(T)
        assert structures_equivalent(S, T)


def test_rank_two_split_structures():
    chars = characters(cyclic(2))

    def with_signs(s1, s2):
        S0 = direct_sum_structures(
            twist_by_character(canonical_cyclic(2, 0), chars[0 if s1 == 1 else 1]),
            twist_by_character(canonical_cyclic(2, 0), chars[0 if s2 == 1 else 1]))
        return S0

    plus_minus = with_signs(1, -1)
    minus_plus = with_signs(-1, 1)
    plus_plus = with_signs(1, 1)
    assert structures_equivalent(plus_minus, minus_plus)  # swap conjugates them
    assert not structures_equivalent(plus_minus, plus_plus)


def test_automorphism_sections_dimension():
    # End(O(0)^2) has the 4 constant matrix units
    assert len(automorphism_sections(model_bundle(1, [0, 0]))) == 4
    # End(O(1) + O(-1)) = O(0)^2 + O(2) + O(-2): 2 + 3 + 0 = 5
    assert len(automorphism_sections(model_bundle(1, [1, -1]))) == 5
