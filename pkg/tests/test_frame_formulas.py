import itertools

import pytest
from hypothesis import given, settings, strategies as st

from gammalog.frame_formulas import (
    OMEGA, ResourceCapExceeded, RootedFrame, cluster_frame, frame_formula,
    gamma, pattern_instance, relative_satisfaction_witness, satisfies_relative,
    substitute, substitution_arity,
)
from gammalog.kripke import PreorderModel, find_p_morphism, model_check
from gammalog.syntax import (
    And, Atom, Box, FormulaError, Not, Top, atoms, parse, pretty,
)

p0, p1 = Atom("p0"), Atom("p1")


def total(worlds):
    return [(a, b) for a in worlds for b in worlds]


# --- cluster frames -----------------------------------------------------------

def test_cluster_frame_shapes():
    c1 = cluster_frame(1, False)
    assert c1.size == 1 and c1.rel == {(0, 0)}
    c2t = cluster_frame(2, True)
    assert c2t.size == 3
    assert c2t.rel == {(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (0, 2), (1, 2)}
    assert len(cluster_frame(3, False).rel) == 9
    with pytest.raises(FormulaError):
        cluster_frame(0, False)


def test_rooted_frame_validation():
    with pytest.raises(Exception):
        RootedFrame(2, frozenset({(0, 0), (1, 1)}))  # 0 does not reach 1


# --- frame formulas -----------------------------------------------------------

def _conjuncts(f):
    assert isinstance(f, Not)
    items = []
    cur = f.sub
    while isinstance(cur, And):
        items.append(cur.right)
        cur = cur.left
    items.append(cur)
    return list(reversed(items))


def test_frame_formula_c1_exact():
    assert pretty(frame_formula(cluster_frame(1, False))) == "~(p0 & []p0 & [](p0 -> <>p0))"


def test_frame_formula_c2_conjunct_count():
    # items (i)-(v) for the 2-cluster: 1 + 1 + 2 + 4 + 0
    assert len(_conjuncts(frame_formula(cluster_frame(2, False)))) == 8


def test_frame_formula_byte_stable():
    a = pretty(frame_formula(cluster_frame(2, True)))
    b = pretty(frame_formula(cluster_frame(2, True)))
    assert a == b
    assert a.startswith("~(p0 & [](p0 | p1 | p2) & ")


def test_natural_model_refutes_frame_formula():
    for n, topped in [(1, False), (2, False), (2, True), (3, False)]:
        frame = cluster_frame(n, topped)
        nm = frame.natural_model()
        beta = frame_formula(frame)
        assert "g0" not in model_check(nm, beta)


def test_frame_formula_rejects_unrooted():
    with pytest.raises(Exception):
        frame_formula(RootedFrame(2, frozenset({(0, 0), (1, 1)})))


def test_gamma():
    assert gamma(OMEGA, False) == Top()
    assert gamma(OMEGA, True) == Top()
    assert gamma(1, False) == frame_formula(cluster_frame(2, False))
    assert atoms(gamma(2, True)) == {"p0", "p1", "p2", "p3"}


# --- substitution ---------------------------------------------------------------

def test_substitute_examples():
    assert substitute(p0, [parse("q")]) == parse("q")
    assert substitute(parse("[](p0 -> p1)"), [parse("p"), parse("~p")]) == parse("[](p -> ~p)")
    assert substitution_arity(parse("[](p0 -> p1)")) == 2
    with pytest.raises(FormulaError):
        substitute(parse("p0 & p1"), [parse("q")])


@st.composite
def _model_and_args(draw):
    size = draw(st.integers(min_value=1, max_value=4))
    worlds = [f"w{i}" for i in range(size)]
    edges = draw(st.sets(st.tuples(st.sampled_from(worlds), st.sampled_from(worlds)), max_size=10))
    val = {
        "p": draw(st.sets(st.sampled_from(worlds), max_size=size)),
        "q": draw(st.sets(st.sampled_from(worlds), max_size=size)),
    }
    model = PreorderModel(worlds, edges, val, closure="auto")
    args = draw(st.lists(
        st.sampled_from([parse("p"), parse("q"), parse("~p"), parse("[]q"), parse("p & q")]),
        min_size=2, max_size=2,
    ))
    return model, args


@settings(max_examples=100, deadline=None)
@given(_model_and_args())
def test_substitution_commutes_with_model_checking(case):
    model, args = case
    chi = parse("[](p0 -> <>p1) & (p1 | ~p0)")
    direct = model_check(model, substitute(chi, args))
    revalued = model.replace(valuation={
        "p0": model_check(model, args[0]),
        "p1": model_check(model, args[1]),
    })
    assert direct == model_check(revalued, chi)


# --- relative satisfaction -------------------------------------------------------

def test_relative_satisfaction_trivial_cases():
    m = PreorderModel(["w"], [("w", "w")], {"p": ["w"]})
    assert satisfies_relative(m, frozenset({"w"}), Top(), [parse("p"), parse("~p")])
    assert satisfies_relative(m, frozenset({"w"}), gamma(1, False), [])


def test_relative_satisfaction_witness_on_split_cluster():
    # a final 2-cluster where p holds at one point only cannot satisfy the
    # 2-cluster formula relative to {p, ~p}
    m = PreorderModel(["a", "b"], total("ab"), {"p": ["a"]})
    cluster = frozenset({"a", "b"})
    witness = relative_satisfaction_witness(m, cluster, gamma(1, False), [parse("p"), parse("~p")])
    assert witness is not None
    assert not satisfies_relative(m, cluster, gamma(1, False), [parse("p"), parse("~p")])


def test_relative_satisfaction_cap():
    m = PreorderModel(["a", "b"], total("ab"), {"p": ["a"]})
    sigma = [parse("p"), parse("~p"), parse("q"), parse("~q")]
    with pytest.raises(ResourceCapExceeded):
        satisfies_relative(m, frozenset({"a", "b"}), gamma(2, True), sigma, max_tuples=10)


# --- pattern instances ------------------------------------------------------------

def test_pattern_instance_exact_shapes():
    phi, psi = parse("p"), parse("q")
    assert pattern_instance("final2", phi) == substitute(gamma(1, False), [phi, Not(phi)])
    nb = Not(Box(phi))
    assert pattern_instance("nonfinal2", phi) == substitute(
        gamma(1, True), [And(nb, phi), And(nb, Not(phi)), Box(phi)]
    )
    assert pattern_instance("final3", phi, psi) == substitute(
        gamma(2, False), [And(phi, psi), And(Not(phi), psi), Not(psi)]
    )
    assert pattern_instance("nonfinal3", phi, psi) == substitute(
        gamma(2, True),
        [And(And(nb, phi), psi), And(And(nb, Not(phi)), psi), And(nb, Not(psi)), Box(phi)],
    )


def test_pattern_instance_arity_misuse():
    with pytest.raises(FormulaError):
        pattern_instance("final2", parse("p"), parse("q"))
    with pytest.raises(FormulaError):
        pattern_instance("final3", parse("p"))
    with pytest.raises(FormulaError):
        pattern_instance("weird", parse("p"))


# --- gamma validity on small frames (Fine's correspondence) -----------------------

def test_gamma_frame_validity_matches_cluster_bounds():
    # gamma(n, topped) is valid on a frame iff no reachable cluster of the
    # corresponding kind exceeds n; brute force over all frames with <= 4
    # points via the unconstrained p-morphism search
    from gammalog.engine import _canonical_frames
    from gammalog.kripke import clusters

    cases = [(1, False), (2, False), (1, True)]
    for k in range(1, 5):
        for rel in _canonical_frames(k):
            worlds = [f"w{i}" for i in range(k)]
            model = PreorderModel(
                worlds, {(worlds[a], worlds[b]) for a, b in rel}, {}
            )
            view = clusters(model)
            for n, topped in cases:
                target = cluster_frame(n + 1, topped)
                image_exists = any(
                    find_p_morphism(model, w, target) is not None for w in worlds
                )
                if topped:
                    offending = any(
                        not fin and len(c) > n
                        for c, fin in zip(view.clusters, view.final)
                    )
                else:
                    offending = any(
                        len(c) > n and fin
                        for c, fin in zip(view.clusters, view.final)
                    )
                # reachability: every cluster is reachable from some world,
                # so offending here means some generated subframe offends
                assert image_exists == offending, (rel, n, topped)


def test_gamma_valuation_bruteforce_matches_morphism_search():
    # Fine's correspondence at the model level for gamma(1, False) on all
    # frames with <= 3 points: refutable under some valuation iff image
    from gammalog.engine import _canonical_frames, eval_on_frame

    beta = gamma(1, False)
    target = cluster_frame(2, False)
    for k in range(1, 4):
        for rel in _canonical_frames(k):
            succ = [0] * k
            for a, b in rel:
                succ[a] |= 1 << b
            refutable = False
            for v0, v1 in itertools.product(range(1 << k), repeat=2):
                bits = eval_on_frame(succ, {"p0": v0, "p1": v1}, beta)
                if bits != (1 << k) - 1:
                    refutable = True
                    break
            worlds = [f"w{i}" for i in range(k)]
            model = PreorderModel(worlds, {(worlds[a], worlds[b]) for a, b in rel}, {})
            image = any(find_p_morphism(model, w, target) is not None for w in worlds)
            assert refutable == image
