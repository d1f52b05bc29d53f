from itertools import islice

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import orbitsep as O
from orbitsep.actions import max_step_displacement
from orbitsep.errors import BudgetExhaustedError, InvalidInputError
from orbitsep.words import is_reduced


def test_compose_invert_examples():
    assert O.compose((1,), (-1,)) == ()
    assert O.invert((1, 2)) == (-2, -1)
    assert O.compose((1, 2), (-2, 1)) == (1, 1)
    assert O.invert(O.invert((1, -2, 1))) == (1, -2, 1)
    assert O.compose((1, -2), O.invert((1, -2))) == ()


def test_reduce_word():
    assert O.reduce_word([1, -1]) == ()
    assert O.reduce_word([1, 2, -2, -1, 1]) == (1,)
    with pytest.raises(InvalidInputError):
        O.reduce_word([0])


def test_apply_examples(z1_action):
    assert z1_action.apply_word((1, 1, 1), (0,)) == (3,)
    assert z1_action.apply_word((), (7,)) == (7,)
    assert z1_action.apply_word((1, -1), (5,)) == (5,)


def test_apply_index_out_of_range(z1_action):
    with pytest.raises(InvalidInputError):
        z1_action.apply_word((2,), (0,))


words_strategy = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=6).map(
    O.reduce_word
)


@settings(max_examples=100, deadline=None)
@given(words_strategy, words_strategy, st.tuples(st.integers(-9, 9), st.integers(-9, 9)))
def test_word_algebra_on_translations(u, v, p):
    act = O.GeneratedAction(
        O.build_zd(2, "linf"), [O.Translation((1, 0)), O.Translation((0, 1))]
    )
    assert act.apply_word(O.compose(u, v), p) == act.apply_word(u, act.apply_word(v, p))
    assert act.apply_word(O.compose(u, O.invert(u)), p) == p
    assert O.compose(u, O.invert(u)) == ()


def test_orbit_stream_order_zd2(zd2_action):
    got = list(islice(O.orbit_stream(zd2_action, (0, 0), O.OrbitBudget(100, 1)), 10))
    assert got == [
        ((0, 0), ()),
        ((1, 0), (1,)),
        ((-1, 0), (-1,)),
        ((0, 1), (2,)),
        ((0, -1), (-2,)),
    ]


def test_orbit_stream_cyclic(c4_action):
    got = list(O.orbit_stream(c4_action, 0, O.OrbitBudget(1000, 20)))
    assert [p for p, _ in got] == [0, 1, 3, 2]
    assert len(got) == 4


def test_orbit_stream_max_points(shift_action):
    got = list(O.orbit_stream(shift_action, 0, O.OrbitBudget(5, 24)))
    assert len(got) == 5
    assert len({p for p, _ in got}) == 5


def test_orbit_stream_properties(zd2_action):
    got = list(O.orbit_stream(zd2_action, (2, -1), O.OrbitBudget(200, 4)))
    points = [p for p, _ in got]
    assert len(points) == len(set(points))
    lengths = [len(w) for _, w in got]
    assert lengths == sorted(lengths)
    for p, w in got:
        assert is_reduced(w)
        assert zd2_action.apply_word(w, (2, -1)) == p


def test_find_escape_derived_example(zd2_action):
    w = O.find_escape(zd2_action, (0, 0), [(0, 0), (1, 1)], 2)
    assert w == (-1, -1)
    assert zd2_action.apply_word(w, (0, 0)) == (-2, 0)


def test_find_escape_empty_q(zd2_action):
    assert O.find_escape(zd2_action, (3, 3), [], 1) == ()


def test_find_escape_budget_exhausted_on_c4(c4_action):
    adapter = O.build_discrete_adapter(c4_action.space)
    act = O.GeneratedAction(adapter, c4_action.generators)
    with pytest.raises(BudgetExhaustedError) as info:
        O.find_escape(act, 0, [0, 1, 2, 3], 1)
    assert info.value.explored == 4


def test_find_escape_validates_eps(zd2_action):
    with pytest.raises(InvalidInputError):
        O.find_escape(zd2_action, (0, 0), [], 0)


def test_separated_family_z(z1_action):
    fam = O.separated_family(z1_action, (0,), 1, 3)
    assert [p for p, _ in fam] == [(0,), (2,), (-2,)]
    for p, w in fam:
        assert z1_action.apply_word(w, (0,)) == p
    for i, (p, _) in enumerate(fam):
        for q, _ in fam[i + 1 :]:
            assert z1_action.space.distance(p, q) >= 2


def test_separated_family_trivial_and_failing(z1_action, c4_action):
    fam = O.separated_family(z1_action, (5,), 2, 1)
    assert fam == [((5,), ())]
    with pytest.raises(BudgetExhaustedError):
        O.separated_family(c4_action, 0, 1, 5)


def test_verify_isometry_translations_clean(zd2_action):
    rng = O.SplitMix64(3)
    pairs = [
        (O.sample_point(zd2_action.space, rng), O.sample_point(zd2_action.space, rng))
        for _ in range(100)
    ]
    assert O.verify_isometry(zd2_action, pairs) == []


def test_verify_isometry_flags_non_automorphism():
    space = O.build_finite_graph(4, [[0, 1, 1], [1, 2, 1], [2, 3, 1], [3, 0, 1]])
    bad = O.GeneratedAction(space, [O.VertexPermutation((1, 0, 2, 3))])
    violations = O.verify_isometry(bad)  # exhaustive, no sample needed
    assert any(v.kind == "distance" for v in violations)


def test_verify_isometry_exhaustive_pass(c4_action):
    assert O.verify_isometry(c4_action) == []


def test_verify_isometry_flags_bad_inverse(z1_action):
    class Broken:
        kind = "translation"

        def forward(self, p):
            return (p[0] + 1,)

        def backward(self, p):
            return (p[0] + 1,)  # wrong on purpose

        def describe(self):
            return "broken"

    act = O.GeneratedAction(O.build_zd(1, "l1"), [O.Translation((1,))])
    act.generators[0] = Broken()
    violations = O.verify_isometry(act, [((0,), (4,))])
    assert any(v.kind == "inverse" for v in violations)


def test_action_validation():
    z2 = O.build_zd(2, "linf")
    with pytest.raises(InvalidInputError):
        O.GeneratedAction(z2, [])
    with pytest.raises(InvalidInputError):
        O.GeneratedAction(z2, [O.Shift()])
    with pytest.raises(InvalidInputError):
        O.GeneratedAction(z2, [O.Translation((1,))])  # dimension mismatch
    f2 = O.build_free(2)
    with pytest.raises(InvalidInputError):
        O.GeneratedAction(f2, [O.LeftMultiplication((3,))])  # beyond rank
    g = O.build_finite_graph(2, [[0, 1, 1]])
    with pytest.raises(InvalidInputError):
        O.GeneratedAction(g, [O.VertexPermutation((1, 2, 0))])  # wrong size


def test_action_on_wrapped_spaces(z1_action, c4_action):
    scaled = O.build_scaled(O.build_zd(1, "l1"), 2)
    O.GeneratedAction(scaled, [O.Translation((1,))])
    adapter = O.build_discrete_adapter(c4_action.space)
    O.GeneratedAction(adapter, [O.VertexPermutation((1, 2, 3, 0))])


def test_orbit_budget_validation():
    with pytest.raises(InvalidInputError):
        O.OrbitBudget(0, 5)
    with pytest.raises(InvalidInputError):
        O.OrbitBudget(5, 0)


def test_generator_json_roundtrip():
    specs = [
        {"kind": "translation", "v": [1, 0]},
        {"kind": "leftmul", "w": "ab'"},
        {"kind": "perm", "p": [1, 2, 3, 0]},
        {"kind": "shift"},
    ]
    for spec in specs:
        assert O.generator_from_json(spec).to_json() == spec
    with pytest.raises(InvalidInputError):
        O.generator_from_json({"kind": "rotation"})


def test_max_step_displacement(free2_action):
    # left multiplication moves the identity by 1 and long words by up to 2L+1
    assert max_step_displacement(free2_action, ()) == 1
    assert max_step_displacement(free2_action, (2, 2)) == 5
