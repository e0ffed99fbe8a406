from __future__ import annotations

import random
from itertools import product

import pytest

from conftest import FIXTURES, fixture_spec
from sol_reidemeister.errors import InconsistentAux, InvalidHyperbolic, InvalidInput, MissingReverser, MissingRoot
from sol_reidemeister.groups import (
    M_NORMAL,
    Family,
    GroupElement,
    GroupSpec,
    bieberbach_rule,
    check_relations,
    discover,
    eta_test,
    group_of,
    is_bieberbach,
    make_spec,
    parameter_space,
    torsion_element,
    validate_spec,
)
from sol_reidemeister.lattice import IDENTITY, IntMat2, vadd

M = IntMat2.from_list


def random_element(G, rng, xr=6, zr=3):
    return G.element(
        (rng.randint(-xr, xr), rng.randint(-xr, xr)),
        rng.randint(-zr, zr),
        rng.randrange(G.f1_order),
        rng.randrange(G.f2_order),
    )


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_group_axioms(name):
    spec = fixture_spec(name)
    G = group_of(spec)
    rng = random.Random(name)
    e = G.identity()
    for _ in range(1000):
        g, h, k = (random_element(G, rng) for _ in range(3))
        assert G.multiply(G.multiply(g, h), k) == G.multiply(g, G.multiply(h, k))
        assert G.multiply(g, e) == g == G.multiply(e, g)
        assert G.multiply(g, G.invert(g)) == e


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_relations_hold(name):
    assert check_relations(fixture_spec(name)) == []


def test_gamma_products():
    G = group_of(make_spec("GammaA", A=[2, 1, 1, 1]))
    g = G.multiply(GroupElement((1, 0), 1), GroupElement((0, 1), -1))
    assert g == GroupElement((2, 1))
    # (a^y t)^-1 = a^(-A^-1 y) t^-1
    assert G.invert(GroupElement((1, 2), 1)) == GroupElement((1, -3), -1)
    assert G.power(GroupElement((1, 0), 1), 3) == GroupElement((8, 4), 3)


@pytest.mark.parametrize("name", ["GammaA", "Pi1", "Pi3", "Pi5", "Pi7", "Pi2Plus", "Pi4"])
def test_power_formula(name):
    spec = fixture_spec(name)
    G = group_of(spec)
    T = G.T
    for y in product(range(-2, 3), repeat=2):
        g = G.multiply(GroupElement(y), GroupElement((0, 0), 1))
        for m in range(-8, 9):
            if m >= 0:
                S = IDENTITY.scale(0)
                for j in range(m):
                    S = S + T ** j
                want = GroupElement(S @ y, m)
            else:
                S = IDENTITY.scale(0)
                for j in range(1, -m + 1):
                    S = S + T ** -j
                want = GroupElement((-(S @ y)[0], -(S @ y)[1]), m)
            assert G.power(g, m) == want


def test_pi1_reflections_are_involutions():
    G = group_of(make_spec("Pi1", A=[2, 1, 1, 1]))
    beta = G.generator("beta")
    assert G.multiply(beta, beta) == G.identity()
    for x in product(range(-3, 4), repeat=2):
        g = G.multiply(GroupElement(x), beta)
        assert G.power(g, 2) == G.identity()


def test_pi7_alpha_has_order_four():
    G = group_of(fixture_spec("Pi7"))
    alpha = G.generator("alpha")
    assert G.power(alpha, 2) != G.identity()
    assert G.power(alpha, 4) == G.identity()


def test_parameter_spaces():
    assert parameter_space(make_spec("Pi1", A=[2, 1, 1, 1]))["k"].coset_reps == ((0, 0),)
    q = parameter_space(make_spec("Pi1", A=[3, 4, 2, 3]))["k"]
    assert q.order == 4 and set(q.coset_reps) == {(0, 0), (1, 0), (0, 1), (1, 1)}
    q = parameter_space(make_spec("Pi3", A=[3, 4, 2, 3], M=[-1, 0, 0, 1]))["k"]
    assert q.order == 2 and q.coset_reps == ((0, 0), (0, 1))
    q = parameter_space(make_spec("Pi3", A=[2, 1, 1, 1], M=[-1, 1, 0, 1]))["k"]
    assert q.order == 1


def test_params_are_canonicalized():
    s = make_spec("Pi1", A=[3, 4, 2, 3], k=(3, 2))
    assert s.param("k") == (1, 0)
    s = make_spec("Pi1", A=[2, 1, 1, 1], k=(1, 1))
    assert s.param("k") == (0, 0)


def test_validation_errors():
    with pytest.raises(MissingRoot):
        make_spec("Pi2Plus", A=[2, 1, 1, 1])
    with pytest.raises(InvalidHyperbolic):
        make_spec("GammaA", A=[1, 1, 0, 1])
    with pytest.raises(InvalidHyperbolic):
        make_spec("GammaA", A=[2, 1, 1, 2])
    with pytest.raises(MissingReverser):
        make_spec("Pi3", A=[2, 1, 1, 1])
    with pytest.raises(InvalidInput):
        GroupSpec.from_json({"family": "Pi9", "A": [2, 1, 1, 1]})
    with pytest.raises(InvalidInput):
        GroupSpec.from_json({"family": "Pi1", "A": [2, 1, 1, 1], "colour": 1})
    # M must reverse A
    with pytest.raises(InconsistentAux):
        make_spec("Pi3", A=[2, 1, 1, 1], M=[-1, 0, 0, 1])


def test_json_round_trip(any_spec):
    data = any_spec.to_json()
    assert validate_spec(GroupSpec.from_json(data)) == any_spec
    g = GroupElement((1, -2), 3, 0, 1)
    assert GroupElement.from_json(g.to_json()) == g


def test_bieberbach_known_cases():
    assert is_bieberbach(make_spec("GammaA", A=[2, 1, 1, 1]))
    assert is_bieberbach(fixture_spec("Pi2Plus"))
    assert is_bieberbach(fixture_spec("Pi2Minus"))
    assert not is_bieberbach(fixture_spec("Pi4"))
    s = make_spec("Pi3", A=[3, 4, 2, 3], M=[-1, 0, 0, 1], k=(0, 1), kp=(0, 1))
    assert not is_bieberbach(s) and bieberbach_rule(s) is False


@pytest.mark.parametrize("family,a,m", [
    ("Pi3", [3, 4, 2, 3], [-1, 0, 0, 1]),
    ("Pi3", [2, 1, 1, 1], [-1, 1, 0, 1]),
    ("Pi6", [7, 12, 4, 7], [-1, 0, 0, 1]),
])
def test_torsion_rule_matches_exact_search(family, a, m):
    base = make_spec(family, A=a, M=m)
    space = parameter_space(base)
    seen = []
    for k, d in product(space["k"].coset_reps, space["kp-k"].coset_reps):
        s = make_spec(family, A=a, M=m, k=k, kp=vadd(k, d))
        tor = torsion_element(s)
        assert bieberbach_rule(s) == (tor is None)
        seen.append(tor is None)
    if family == "Pi3" and a == [3, 4, 2, 3]:
        assert seen.count(True) == 1


def test_torsion_witness_has_finite_order(any_spec):
    G = group_of(any_spec)
    w = torsion_element(any_spec)
    if w is None:
        return
    assert w != G.identity()
    assert any(G.power(w, n) == G.identity() for n in range(2, 9))


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_rule_agrees_with_search_on_fixtures(name):
    spec = fixture_spec(name)
    rule = bieberbach_rule(spec)
    if rule is not None:
        assert rule == is_bieberbach(spec)


def test_eta():
    a = M([11, 4, 8, 3])
    assert M_NORMAL @ a @ M_NORMAL == a.inverse()
    assert eta_test(a, M_NORMAL) == 2
    assert eta_test(M([2, 1, 1, 1]), M_NORMAL) == 1
    # a diagonal-type reverser always gives 1
    assert eta_test(M([3, 4, 2, 3]), M([-1, 0, 0, 1])) == 1
    assert make_spec("Pi5", A=[11, 4, 8, 3], M=[-1, 1, 0, 1]).eta == 2


def test_discover():
    out = discover(M([2, 1, 1, 1]))
    fams = [f["family"] for f in out["constructible"]]
    assert fams == ["GammaA", "Pi1", "Pi2Minus", "Pi3", "Pi4", "Pi5", "Pi7", "Pi8"]
    assert {"N": [-1, -1, -1, 0], "det": -1} in out["square_roots"]
    fams = {f["family"] for f in discover(M([2, 3, 3, 5]))["constructible"]}
    assert {"Pi2Plus", "Pi6"} <= fams and "Pi2Minus" not in fams
    out = discover(M([3, 2, 4, 3]))
    assert out["reversing"]["1"] and out["reversing"]["-1"]


def test_family_enum_values():
    assert [f.value for f in Family][:4] == ["GammaA", "Pi1", "Pi2Plus", "Pi2Minus"]
