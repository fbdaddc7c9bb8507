import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chainscope.errors import ConfigError, DomainError
from chainscope.systems import (
    ONES,
    ZEROS,
    Interval,
    Piece,
    PiecewiseMap,
    Subshift,
    Word,
    builtin_system,
    grid_sample,
    interval_eval,
    interval_map,
    load_system_config,
    parse_state,
    subshift_universe,
    word_dist,
    word_shift,
)


@pytest.mark.parametrize("x, expected", [(0.0, 0.75), (0.5, 0.25), (0.75, 0.625)])
def test_akin_pieces(x, expected):
    assert interval_eval(interval_map("akin"), x) == expected


def test_akin_orbits_stay_in_their_half():
    f = interval_map("akin")
    for x in (0.01, 0.2, 0.4999):
        assert 0 < f(x) < 0.5
    for x in (0.5001, 0.6, 1.0):
        assert 0.5 < f(x) <= 0.75


def test_akin_orbit_near_half_never_rounds_onto_half():
    # x(x+1/2) at 0.5 - 1e-17 would round to exactly 0.5 without the image clamp
    f = interval_map("akin")
    x = 0.4999999999999999
    assert f(x) < 0.5
    x = 0.5000000000000001
    for _ in range(200):
        x = f(x)
        assert x > 0.5


def test_eval_outside_domain():
    with pytest.raises(DomainError):
        interval_eval(interval_map("square"), 1.5)


def test_overlapping_pieces_rejected():
    with pytest.raises(ValueError, match="partition"):
        PiecewiseMap((Piece(Interval(0, 0.6), lambda x: x), Piece(Interval(0.5, 1), lambda x: x)))


def test_gap_in_pieces_rejected():
    with pytest.raises(ValueError, match="partition"):
        PiecewiseMap((Piece(Interval(0, 0.5, True, False), lambda x: x), Piece(Interval(0.5, 1, False, True), lambda x: x)))


def test_formula_leaving_domain_rejected():
    with pytest.raises(ValueError, match="outside"):
        PiecewiseMap((Piece(Interval(0, 1), lambda x: 2 * x),))


@pytest.mark.parametrize(
    "n, required, expected",
    [
        (5, (), (0, 0.25, 0.5, 0.75, 1)),
        (3, (0.5,), (0, 0.5, 1)),
        (2, (0.3,), (0, 0.3, 1)),
    ],
)
def test_grid_sample(n, required, expected):
    assert grid_sample((0, 1), n, required) == expected


def test_grid_too_small():
    with pytest.raises(ConfigError):
        grid_sample((0, 1), 1)


def test_required_outside_domain():
    with pytest.raises(ConfigError):
        grid_sample((0, 1), 5, [1.2])


def test_builtin_examples():
    cyc = builtin_system("cycle", n=3)
    assert cyc.eval(0) == 1 and cyc.eval(2) == 0
    assert cyc.dist(0, 2) == pytest.approx(1 / 3)
    assert builtin_system("logistic4").eval(0.75) == 0.75
    assert builtin_system("square").eval(0.5) == 0.25


def test_akin_grid_contains_zero_and_half():
    s = builtin_system("akin", grid_n=10)
    assert 0.0 in s.samples and 0.5 in s.samples


@pytest.mark.parametrize("name", ["akin", "square", "logistic4", "identity"])
@given(a=st.floats(0, 1), b=st.floats(0, 1), c=st.floats(0, 1))
def test_interval_metric_axioms(name, a, b, c):
    d = builtin_system(name).dist
    assert d(a, b) == d(b, a) >= 0
    assert (d(a, b) == 0) == (a == b)
    assert d(a, c) <= d(a, b) + d(b, c) + 1e-15


@given(n=st.integers(2, 12), a=st.integers(0, 11), b=st.integers(0, 11), c=st.integers(0, 11))
def test_cycle_metric_axioms(n, a, b, c):
    d = builtin_system("cycle", n=n).dist
    a, b, c = a % n, b % n, c % n
    assert d(a, b) == d(b, a)
    assert (d(a, b) == 0) == (a == b)
    assert d(a, c) <= d(a, b) + d(b, c) + 1e-15


@pytest.mark.parametrize("name", ["akin", "square", "logistic4", "identity"])
def test_vectorized_eval_agrees(name):
    s = builtin_system(name, grid_n=257)
    xs = np.array(s.samples)
    assert s.eval_array(xs).tolist() == [s.eval(x) for x in s.samples]


# ---------------------------------------------------------------------------
# words


def test_word_canonical_form():
    assert Word("1100111", "1") == Word("1100", "1")
    assert str(Word("1100", "1")) == "11001inf"
    assert Word.parse("11001inf") == Word("1100", "1")
    assert Word("111000", "1").pretty() == "1^3 0^3 1^inf"


def test_parse_rejects_garbage():
    with pytest.raises(ConfigError):
        Word.parse("1102inf")


def test_shift_examples():
    assert word_shift(Word("111000", "1")) == Word("11000", "1")
    assert word_shift(ONES) == ONES
    w = Subshift("sigma2").generator(2)
    assert w == Word("110010", "0")
    for _ in range(5):
        w = word_shift(w)
    assert w == ZEROS


def test_dist_examples():
    assert word_dist(ZEROS, ONES) == 1.0
    assert word_dist(ONES, Word("111000", "1")) == 2.0**-3
    assert word_dist(Word("0110", "1"), Word("0110", "1")) == 0.0


words = st.builds(Word, st.text("01", max_size=10), st.sampled_from("01"))


@given(words, words, words)
def test_word_metric_is_ultrametric(u, v, w):
    assert word_dist(u, w) <= max(word_dist(u, v), word_dist(v, w))
    assert word_dist(u, v) == word_dist(v, u)
    assert (word_dist(u, v) == 0) == (u == v)


@given(words, words)
def test_shift_doubles_distance_when_first_symbols_agree(u, v):
    # d(su, sv) = 2 d(u, v) whenever u, v agree at position 0
    if u != v and u.symbol(0) == v.symbol(0):
        assert word_dist(word_shift(u), word_shift(v)) == 2 * word_dist(u, v)


@given(st.integers(1, 10))
def test_sigma2_generators_reach_zero(k):
    w = Subshift("sigma2").generator(k)
    for _ in range(2 * k):
        w = word_shift(w)
        assert w != ZEROS
    assert word_shift(w) == ZEROS


@given(st.integers(1, 10))
def test_sigma1_generators_reach_ones(k):
    w = Subshift("sigma1").generator(k)
    for _ in range(2 * k - 1):
        w = word_shift(w)
        assert w != ONES
    assert word_shift(w) == ONES


def test_universe_small_cases():
    assert subshift_universe(Subshift("sigma1"), 1) == (Word("10", "1"), Word("0", "1"), ONES, ZEROS)
    assert subshift_universe(Subshift("sigma2"), 1) == (Word("101", "0"), Word("01", "0"), Word("1", "0"), ONES, ZEROS)


def test_universe_sizes():
    assert len(Subshift("sigma1", 6).universe()) == 29
    assert len(Subshift("sigma2", 8).universe()) == 47


def test_forbidden_factor_010():
    assert Subshift("sigma1").forbidden("010")
    assert not Subshift("sigma2").forbidden("010")
    assert Subshift("sigma2").forbidden("0110")


def test_forbidden_long_ones_before_short_zeros():
    s = Subshift("sigma1")
    assert s.forbidden("11101")
    assert not s.forbidden("1100")       # not yet terminated
    assert not s.forbidden("110011")
    assert not s.admissible(Word("11101", "1"))


@pytest.mark.parametrize("sid", ["sigma1", "sigma2"])
@given(k=st.integers(1, 12))
def test_generators_admissible(sid, k):
    assert Subshift(sid).admissible(Subshift(sid).generator(k))


# ---------------------------------------------------------------------------
# config loading


def test_load_config_fields():
    s = load_system_config({"system": "akin", "grid_n": 11, "required_points": [0.123]})
    assert 0.123 in s.samples and 0.5 in s.samples
    assert load_system_config({"system": "cycle", "cycle_n": 5}).n == 5
    assert load_system_config({"system": "sigma1", "truncation_k": 2}).n == len(Subshift("sigma1", 2).universe())


@pytest.mark.parametrize(
    "cfg, field",
    [
        ({}, "system"),
        ({"system": "akin", "grid_n": 1}, "grid_n"),
        ({"system": "cycle", "cycle_n": "x"}, "cycle_n"),
        ({"system": "sigma2", "truncation_k": 0}, "truncation_k"),
        ({"system": "tent"}, "system"),
    ],
)
def test_load_config_errors_name_the_field(cfg, field):
    with pytest.raises(ConfigError, match=field):
        load_system_config(cfg)


def test_parse_state_forms():
    s = builtin_system("sigma1", k=3)
    assert parse_state(s, "1inf") == ONES
    assert parse_state(s, "@0") == s.samples[0]
    with pytest.raises(ConfigError):
        parse_state(s, f"@{s.n}")
    assert parse_state(builtin_system("cycle", n=4), "2") == 2
    assert math.isclose(parse_state(builtin_system("square"), "0.25"), 0.25)
