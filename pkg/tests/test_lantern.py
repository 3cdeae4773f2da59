import random

import pytest
from sympy.combinatorics.free_groups import free_group

from torelli_cert.errors import ParameterError
from torelli_cert.lantern import (
    FACTORIZATIONS, FIGURES, IDENTITY, LANTERN_NAMES, FreeAut, TwistWord, apply, aut_equal,
    build_config, compose, config_violations, conjugation, evaluate, invert,
    is_conjugate, is_lantern_consequence, lantern_twists, reduce, transvection_product,
    verify_factorization, verify_lantern_relation,
)
from torelli_cert.symplectic import HEndo, SurfaceParams, transvection

F, X1, X2, X3 = free_group("x1 x2 x3")
GENS = (X1, X2, X3)


def to_sympy(word):
    out = F.identity
    for x in word:
        out = out * (GENS[abs(x) - 1] if x > 0 else GENS[abs(x) - 1] ** -1)
    return out


def substitute(images, elem):
    # apply the endomorphism x_i -> images[i] to a sympy word
    out = F.identity
    for sym, exp in elem.array_form:
        out = out * images[("x1", "x2", "x3").index(str(sym))] ** exp
    return out


def sympy_compose(*image_lists):
    imgs = list(GENS)
    for images in reversed(image_lists):
        imgs = [substitute(images, w) for w in imgs]
    return imgs


def sympy_twists():
    # independent hand-written formulas for the same conventions
    w = X1 * X2 * X3
    conj = lambda u, g: u * g * u ** -1  # noqa: E731
    u = X1 * X2 * X3 * X2 ** -1
    y2 = X2 * X3 * X2 ** -1
    return {
        "a": list(GENS), "b": list(GENS), "c": list(GENS),
        "d": [conj(w, g) for g in GENS],
        "x": [conj(X1 * X2, X1), conj(X1 * X2, X2), X3],
        "y": [conj(u, X1), X2, X2 ** -1 * conj(u, y2) * X2],
        "z": [X1, conj(X2 * X3, X2), conj(X2 * X3, X3)],
    }


def test_sympy_oracle_lantern():
    t = sympy_twists()
    assert sympy_compose(t["x"], t["y"], t["z"]) == sympy_compose(t["a"], t["b"], t["c"], t["d"])
    assert sympy_compose(t["z"], t["y"], t["x"]) != sympy_compose(t["d"])


def test_engine_matches_sympy_oracle():
    ours = lantern_twists()
    theirs = sympy_twists()
    for name in LANTERN_NAMES:
        assert [to_sympy(w) for w in ours[name].images] == theirs[name]


def test_reduce_and_apply():
    assert reduce((1, -1, 2)) == (2,)
    assert apply(IDENTITY, (1, 2, -3)) == (1, 2, -3)
    with pytest.raises(ParameterError):
        reduce((4,))
    assert invert((1, -2)) == (2, -1)
    assert is_conjugate((2, 1, -2), (1,)) and not is_conjugate((1, 2), (1,))


def test_lantern_examples():
    t = lantern_twists()
    assert apply(t["a"], (2,)) == (2,)
    assert apply(t["d"], (1,)) == (1, 2, 3, 1, -3, -2, -1)
    assert all(t[n].is_peripheral() for n in LANTERN_NAMES)


@pytest.mark.parametrize("seed", range(20))
def test_compose_with_inverse_is_identity(seed):
    rng = random.Random(seed)
    t = lantern_twists()
    word = [rng.choice([t[n], t[n].inverse]) for n in rng.choices(LANTERN_NAMES, k=6)]
    f = compose(*word)
    assert aut_equal(compose(f, f.inverse), IDENTITY)
    assert aut_equal(compose(f.inverse, f), IDENTITY)
    assert f.is_peripheral()
    # agrees with the sympy substitution engine
    images = sympy_compose(*[[to_sympy(w) for w in g.images] for g in word])
    assert [to_sympy(w) for w in f.images] == images


def test_bad_inverse_rejected():
    with pytest.raises(ParameterError):
        FreeAut(((1,), (2,), (3,)), ((1,), (2,), (1, 3)))


def test_verify_lantern_relation_passes():
    cert = verify_lantern_relation()
    assert cert.verdict == "pass"
    assert cert.transcript["lhs.x1"] == "x1 x2 x3 x1 x3^-1 x2^-1 x1^-1"


def test_mutation_control_fails():
    t = dict(lantern_twists())
    t["x"] = compose(conjugation((1,)), t["x"])
    cert = verify_lantern_relation(t)
    assert cert.verdict == "fail" and cert.metrics["relation_ok"] == 0


@pytest.mark.parametrize("order,ok", [("xyz", True), ("yzx", True), ("zxy", True),
                                      ("zyx", False), ("xzy", False)])
def test_product_orders(order, ok):
    assert verify_lantern_relation(order=order).passed is ok


def test_mirror_convention():
    assert verify_lantern_relation(mirror=True).passed
    m, t = lantern_twists(mirror=True), lantern_twists()
    for a, b in (("x", "z"), ("y", "y"), ("z", "x"), ("d", "d")):
        assert aut_equal(m[a], t[b].inverse)


def test_twistword_normal_form():
    w = TwistWord.parse("x a y y^-1 a^-1 b^2 T_c")
    assert w.letters == (("x", 1),) and w.central == (0, 2, 1, 0)
    with pytest.raises(ParameterError):
        TwistWord.parse("q")
    assert str(TwistWord.parse("")) == "1"


def test_rewriting_examples():
    lhs = TwistWord.parse("x a^-1 y b^-1 z c^-1")
    assert lhs.letters == (("x", 1), ("y", 1), ("z", 1)) and lhs.central == (-1, -1, -1, 0)
    assert is_lantern_consequence(TwistWord.parse("d") * lhs.inverse())
    assert is_lantern_consequence(TwistWord.parse("y") * TwistWord.parse("a x^-1 c z^-1 b d").inverse())
    assert not is_lantern_consequence(TwistWord.parse("d") * TwistWord.parse("x a^-1 y z c^-1").inverse())
    assert not is_lantern_consequence(TwistWord.parse("z y x a^-1 b^-1 c^-1 d^-1"))


@pytest.mark.parametrize("prop_id", sorted(FACTORIZATIONS))
@pytest.mark.parametrize("mirror", [False, True])
def test_factorizations(prop_id, mirror):
    cert = verify_factorization(prop_id, mirror=mirror)
    assert cert.verdict == "pass"
    assert cert.metrics["rewrite_ok"] == cert.metrics["automorphism_ok"] == 1
    if prop_id == "3.3":
        assert cert.metrics["trivial_b_ok"] == 1


def test_relation_implies_factorizations():
    # the automorphism checks follow from the relation for any twists
    rng = random.Random(5)
    for _ in range(10):
        t = dict(lantern_twists())
        if rng.random() < 0.5:
            t["y"] = compose(conjugation((rng.choice([1, 2, 3]),)), t["y"])
        rel = verify_lantern_relation(t).passed
        for prop_id, (_, lhs, rhs) in FACTORIZATIONS.items():
            same = aut_equal(evaluate(TwistWord.parse(lhs), t), evaluate(TwistWord.parse(rhs), t))
            if rel:
                assert same


def test_unknown_factorization():
    with pytest.raises(ParameterError):
        verify_factorization("3.4")


def valid_figure_params(gmax=6):
    for g in range(3, gmax + 1):
        for k in range(1, g - 1):
            for kind in ("closed", "punctured", "bordered"):
                p = SurfaceParams(g, k, kind)
                for fig in FIGURES:
                    if fig == "fig2_right" and (kind == "closed" or g < 4 or k != g - 2):
                        continue
                    yield fig, p


@pytest.mark.parametrize("fig,p", list(valid_figure_params()), ids=lambda v: str(v))
def test_config_invariants(fig, p):
    config = build_config(fig, p)
    assert config_violations(config) == []
    for rec in config.curves.values():
        if rec.role == "separating":
            assert rec.homology.is_zero()
        else:
            assert rec.homology == config.curves[rec.partner].homology


@pytest.mark.parametrize("fig,p", list(valid_figure_params()), ids=lambda v: str(v))
def test_full_identities_act_trivially(fig, p):
    config = build_config(fig, p)
    for _, (figure, lhs, rhs) in FACTORIZATIONS.items():
        if figure != fig:
            continue
        word = TwistWord.parse(lhs) * TwistWord.parse(rhs).inverse()
        assert transvection_product(word, config).is_identity()


def test_config_examples():
    c = build_config("fig1_left", SurfaceParams(3, 1))
    assert c.curves["d"].role == "separating" and c.curves["d"].genus == 1
    assert [(n, c.curves[n].partner) for n in "xyz"] == [("x", "a"), ("y", "b"), ("z", "c")]
    c = build_config("fig2_right", SurfaceParams(4, 2, "punctured"))
    assert [c.curves[n].genus for n in "bdy"] == [4, 2, 2]


def test_config_errors():
    with pytest.raises(ParameterError):
        build_config("fig1_left", SurfaceParams(3, 2))
    with pytest.raises(ParameterError):
        build_config("fig2_right", SurfaceParams(4, 2, "closed"))
    with pytest.raises(ParameterError):
        build_config("fig2_right", SurfaceParams(5, 2, "bordered"))
    with pytest.raises(ParameterError):
        build_config("fig3", SurfaceParams(4, 2))


def test_transvection_product_examples():
    c = build_config("fig1_left", SurfaceParams(3, 1))
    assert transvection_product(TwistWord.parse("d"), c).is_identity()
    assert transvection_product(TwistWord.parse("x a^-1"), c).is_identity()
    tx = transvection_product(TwistWord.parse("x"), c)
    assert not tx.is_identity()
    assert tx == transvection(c.curves["x"].homology)
    assert transvection_product(TwistWord(), c) == HEndo.identity(3)


def test_factorization_with_params():
    cert = verify_factorization("3.2", SurfaceParams(5, 3, "closed"))
    assert cert.passed
    assert cert.metrics["homology_ok"] == cert.metrics["config_ok"] == 1
