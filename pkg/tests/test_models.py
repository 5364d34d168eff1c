import json

import pytest

from chrotop.errors import Unsupported
from chrotop.models import (
    ExecutionWord,
    RoundSchedule,
    builtin_model,
    enumerate_prefixes,
    enumerate_round_schedules,
    iis,
    is_excluded_limit,
    load_model_json,
    word,
)
from chrotop.simplicial import Complex, Simplex, Vertex
from chrotop.subdivision import cell_of_word, chr_iterate


def test_schedule_counts():
    assert len(enumerate_round_schedules(1)) == 1
    assert len(enumerate_round_schedules(2)) == 3
    assert len(enumerate_round_schedules(3)) == 13
    with pytest.raises(Unsupported):
        enumerate_round_schedules(6)


def test_arrow_parsing_round_trip():
    for name in ("->", "<-", "<->"):
        s = RoundSchedule.parse(name)
        assert str(s) == name
        assert RoundSchedule.parse(s.to_json_obj()) == s


def test_prefix_counts():
    assert len(enumerate_prefixes(builtin_model("iis2"), 2)) == 9
    assert len(enumerate_prefixes(builtin_model("m1"), 1)) == 2
    assert len(enumerate_prefixes(builtin_model("m2"), 3)) == 27


def test_m1_first_round_restriction():
    prefixes = enumerate_prefixes(builtin_model("m1"), 1)
    names = {str(p[0]) for p in prefixes}
    assert names == {"->", "<-"}


def test_m2_prefixes_match_iis_up_to_depth_four():
    m2 = builtin_model("m2")
    iis2 = builtin_model("iis2")
    for depth in range(5):
        assert enumerate_prefixes(m2, depth) == enumerate_prefixes(iis2, depth)


def test_prefix_closure_and_extendability_to_depth_four():
    for name in ("iis2", "m1", "m2"):
        model = builtin_model(name)
        participants = frozenset(range(model.n))
        by_depth = {d: set(enumerate_prefixes(model, d)) for d in range(5)}
        for d in range(1, 5):
            for prefix in by_depth[d]:
                assert prefix[:-1] in by_depth[d - 1]
        for d in range(4):
            for prefix in by_depth[d]:
                assert any(p[:-1] == prefix for p in by_depth[d + 1])


def test_prefix_chr_correspondence():
    base = Complex([Simplex([Vertex(0, 0), Vertex(1, 1)])])
    facet = base.facets[0]
    for name, onto in (("iis2", True), ("m1", False)):
        model = builtin_model(name)
        for depth in (1, 2):
            prefixes = enumerate_prefixes(model, depth)
            cells = {cell_of_word(facet, tuple(s.blocks for s in p)) for p in prefixes}
            assert len(cells) == len(prefixes)
            all_facets = set(chr_iterate(base, depth).facets)
            assert cells <= all_facets
            assert (cells == all_facets) == onto


def test_excluded_limit_normalization():
    m2 = builtin_model("m2")
    direct = ExecutionWord(word("<->"), word("<-"))
    assert is_excluded_limit(m2, direct)
    unrolled = ExecutionWord(word("<->", "<-", "<-"), word("<-", "<-"))
    assert is_excluded_limit(m2, unrolled)
    assert not is_excluded_limit(m2, ExecutionWord((), word("<-")))
    assert not is_excluded_limit(builtin_model("iis2"), direct)


def test_excluded_word_prefixes_allowed():
    m2 = builtin_model("m2")
    e = m2.excluded[0]
    for depth in range(5):
        assert m2.allowed_prefix(frozenset({0, 1}), e.prefix(depth))


def test_ll_alias_is_two_process_iis():
    ll = builtin_model("ll")
    iis2 = builtin_model("iis2")
    for depth in range(4):
        assert enumerate_prefixes(ll, depth) == enumerate_prefixes(iis2, depth)


def test_model_json_round_trip():
    for name in ("iis2", "m1", "m2"):
        model = builtin_model(name)
        loaded = load_model_json(model.to_json())
        assert loaded.n == model.n
        assert loaded.excluded == model.excluded
        for depth in range(4):
            assert enumerate_prefixes(loaded, depth) == enumerate_prefixes(model, depth)


def test_sub_participation_unrestricted():
    m1 = builtin_model("m1")
    solo = frozenset({1})
    assert len(enumerate_prefixes(m1, 3, solo)) == 1
