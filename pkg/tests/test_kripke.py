import itertools

import pytest
from hypothesis import given, settings, strategies as st

from gammalog.frame_formulas import cluster_frame
from gammalog.kripke import (
    ModelError, PreorderModel, clusters, cluster_sizes, dump_model,
    find_p_morphism, generated_submodel, is_confluent, load_model,
    model_check, model_from_dict,
)
from gammalog.syntax import Atom, Box, parse


def total(worlds):
    return [(a, b) for a in worlds for b in worlds]


def test_construction_validates_preorder():
    with pytest.raises(ModelError):
        PreorderModel(["a", "b"], [("a", "b")], {})  # not reflexive
    with pytest.raises(ModelError):
        PreorderModel(
            ["a", "b", "c"],
            [("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c")],
            {},
        )  # not transitive
    with pytest.raises(ModelError):
        PreorderModel(["a"], [("a", "a")], {"p": ["zzz"]})
    with pytest.raises(ModelError):
        PreorderModel([], [], {})


def test_auto_closure():
    m = PreorderModel(["a", "b", "c"], [("a", "b"), ("b", "c")], {}, closure="auto")
    assert m.leq("a", "c") and m.leq("a", "a")


def test_model_check_reflexive_singleton():
    m = PreorderModel(["w"], [("w", "w")], {"p": ["w"]})
    assert model_check(m, parse("[]p")) == {"w"}


def test_model_check_two_chain():
    m = PreorderModel(["x", "y"], [("x", "y")], {"p": ["y"]}, closure="auto")
    assert model_check(m, parse("<>p")) == {"x", "y"}
    assert model_check(m, parse("[]p")) == {"y"}


def test_model_check_confluent_diamond():
    # root, two middles, one top; p only at the top: derived by hand from the
    # semantics, every world reaches the top and every successor set does
    m = PreorderModel(
        ["r", "a", "b", "t"],
        [("r", "a"), ("r", "b"), ("a", "t"), ("b", "t")],
        {"p": ["t"]},
        closure="auto",
    )
    everything = frozenset(m.worlds)
    assert model_check(m, parse("<>[]p")) == everything
    assert model_check(m, parse("[]<>p")) == everything


def test_unknown_atom_is_empty():
    m = PreorderModel(["w"], [("w", "w")], {})
    assert model_check(m, parse("q")) == frozenset()
    assert model_check(m, parse("~q")) == {"w"}


def test_clusters_single_final():
    m = PreorderModel(["a", "b", "c"], total("abc"), {})
    view = clusters(m)
    assert len(view.clusters) == 1 and view.final == (True,)
    assert len(view.clusters[0]) == 3


def test_clusters_chain():
    m = PreorderModel(["a", "b"], [("a", "b")], {}, closure="auto")
    view = clusters(m)
    assert view.final == (False, True)
    assert view.clusters == (frozenset({"a"}), frozenset({"b"}))


def test_clusters_topped_two_cluster():
    m = cluster_frame(2, True).as_model()
    view = clusters(m)
    finals = [len(c) for c, fin in zip(view.clusters, view.final) if fin]
    nonfinals = [len(c) for c, fin in zip(view.clusters, view.final) if not fin]
    assert finals == [1] and nonfinals == [2]
    assert cluster_sizes(m) == ([1], [2])


def test_generated_submodel():
    m = PreorderModel(
        ["r", "a", "b", "t"],
        [("r", "a"), ("r", "b"), ("a", "t"), ("b", "t")],
        {"p": ["t"]},
        closure="auto",
    )
    top = generated_submodel(m, "t")
    assert set(top.worlds) == {"t"}
    whole = generated_submodel(m, "r")
    assert set(whole.worlds) == set(m.worlds)
    twice = generated_submodel(generated_submodel(m, "a"), "a")
    assert twice == generated_submodel(m, "a")
    with pytest.raises(ModelError):
        generated_submodel(m, "zzz")


def test_is_confluent():
    single = PreorderModel(["a", "b"], total("ab"), {})
    assert is_confluent(single)
    fork = PreorderModel(["r", "a", "b"], [("r", "a"), ("r", "b")], {}, closure="auto")
    assert not is_confluent(fork)
    assert is_confluent(cluster_frame(2, True).as_model())


def test_p_morphism_identity_spec():
    frame = cluster_frame(2, False)
    nm = frame.natural_model()
    pm = find_p_morphism(nm, "g0", frame, [Atom("p0"), Atom("p1")])
    assert pm is not None
    pm.validate()
    assert pm.mapping == {"g0": 0, "g1": 1}


def test_p_morphism_two_chain_onto_two_cluster_absent():
    chain = PreorderModel(["a", "b"], [("a", "b")], {}, closure="auto")
    frame = cluster_frame(2, False)
    # independent oracle: enumerate all four maps and check the conditions
    viable = []
    for fa, fb in itertools.product(range(2), repeat=2):
        mapping = {"a": fa, "b": fb}
        surjective = {fa, fb} == {0, 1}
        monotone = True  # any map into a single cluster is monotone
        back = all(
            any(mapping[v] == j for v in chain.successors(w))
            for w in chain.worlds
            for j in range(2)
        )
        if surjective and monotone and back:
            viable.append(mapping)
    assert viable == []
    assert find_p_morphism(chain, "a", frame) is None


def test_p_morphism_three_cluster_onto_two_cluster_exists():
    m = PreorderModel(["a", "b", "c"], total("abc"), {})
    pm = find_p_morphism(m, "a", cluster_frame(2, False))
    assert pm is not None
    pm.validate()


def test_p_morphism_malformed_target():
    m = PreorderModel(["a"], [("a", "a")], {})

    class Bad:
        size = 2
        rel = frozenset({(0, 0), (1, 1)})  # not rooted

    with pytest.raises(ModelError):
        find_p_morphism(m, "a", Bad())


def test_p_morphism_bad_spec_length():
    m = PreorderModel(["a"], [("a", "a")], {})
    with pytest.raises(ModelError):
        find_p_morphism(m, "a", cluster_frame(2, False), [Atom("p0")])


# --- hypothesis properties ----------------------------------------------------

@st.composite
def small_models(draw):
    size = draw(st.integers(min_value=1, max_value=4))
    worlds = [f"w{i}" for i in range(size)]
    edges = draw(
        st.sets(
            st.tuples(st.sampled_from(worlds), st.sampled_from(worlds)),
            max_size=size * size,
        )
    )
    val_p = draw(st.sets(st.sampled_from(worlds), max_size=size))
    val_q = draw(st.sets(st.sampled_from(worlds), max_size=size))
    return PreorderModel(worlds, edges, {"p": val_p, "q": val_q}, closure="auto")


_small_formulas = st.recursive(
    st.sampled_from([parse("p"), parse("q"), parse("false")]),
    lambda sub: st.one_of(
        st.builds(lambda f: parse(f"~({pretty_of(f)})"), sub),
        st.builds(Box, sub),
    ),
    max_leaves=3,
)


def pretty_of(f):
    from gammalog.syntax import pretty
    return pretty(f)


@settings(max_examples=120, deadline=None)
@given(small_models(), _small_formulas)
def test_box_persistence(model, f):
    boxed = Box(f)
    holds = model_check(model, boxed)
    sub = model_check(model, f)
    for w in holds:
        assert model.successors(w) <= sub


@settings(max_examples=80, deadline=None)
@given(small_models(), _small_formulas)
def test_generated_submodel_truth_invariance(model, f):
    x = model.worlds[0]
    sub = generated_submodel(model, x)
    inner = model_check(sub, f)
    outer = model_check(model, f)
    for y in sub.worlds:
        assert (y in inner) == (y in outer)


# --- JSON ----------------------------------------------------------------------

def test_json_roundtrip(tmp_path):
    m = PreorderModel(
        ["a", "b"], [("a", "b")], {"p": ["b"], "q": []}, closure="auto"
    )
    path = tmp_path / "model.json"
    dump_model(m, str(path))
    again = load_model(str(path))
    assert again == m


def test_json_strict_rejects_non_preorder():
    data = {"worlds": ["a", "b"], "order": [["a", "b"]], "valuation": {}, "closure": "strict"}
    with pytest.raises(ModelError):
        model_from_dict(data)
    data["closure"] = "auto"
    assert model_from_dict(data).leq("a", "a")


def test_json_malformed():
    with pytest.raises(ModelError):
        model_from_dict({"order": []})
