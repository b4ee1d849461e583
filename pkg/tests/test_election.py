from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plurality_ne import (
    ABSTAIN,
    Election,
    InvalidProfileError,
    Lottery,
    PrincipledProfile,
    TieRule,
    TrivialPolicy,
    derive_preference,
    expected_utility,
    lottery,
    scores,
)
from plurality_ne.election import format_ballots, utilities_from_ranking

from conftest import elections

F = Fraction
_ = ABSTAIN


def comparison():
    return Election.from_rankings([(1, 2, 0)] + [(2, 1, 0)] * 3)


@pytest.mark.parametrize("u, order", [
    ((3, 2, 1), (0, 1, 2)),
    ((20, 4, 1), (0, 1, 2)),
    ((1, 3, 2), (1, 2, 0)),
])
def test_derive_preference(u, order):
    assert derive_preference(u) == order


@pytest.mark.parametrize("bad", [(1, 1, 2), (0, 1, 2), (-3, 2, 1), (1.5, 2, 3)])
def test_invalid_utilities_rejected(bad):
    with pytest.raises(InvalidProfileError):
        derive_preference(bad)
    with pytest.raises(InvalidProfileError):
        Election((bad,))


def test_election_shape_checks():
    with pytest.raises(InvalidProfileError):
        Election(())
    with pytest.raises(InvalidProfileError):
        Election(((1, 2), (1, 2, 3)))
    with pytest.raises(InvalidProfileError):
        Election(((),))


def test_rank_derived_utilities():
    assert utilities_from_ranking((1, 2, 0)) == (1, 3, 2)
    with pytest.raises(InvalidProfileError):
        utilities_from_ranking((0, 0, 1))


def test_scores_single_vote():
    board = scores(comparison(), (1, _, _, _))
    assert board.scores == (0, 1, 0)
    assert board.W == (1,)


def test_scores_trivial_ballot_is_full_tie():
    board = scores(comparison(), (_, _, _, _))
    assert board.W == (0, 1, 2)
    assert board.M == 0


def test_scores_truthful_comparison_profile():
    board = scores(comparison(), (1, 2, 2, 2))
    assert board.scores == (0, 1, 3)
    assert board.W == (2,)
    assert board.H == ()
    # c2 sits exactly two below the winner
    assert board.Hprime == (1,)


def test_scores_reject_bad_ballots():
    with pytest.raises(InvalidProfileError):
        scores(comparison(), (1, 2))
    with pytest.raises(InvalidProfileError):
        scores(comparison(), (1, 2, 3, 2))


def test_lottery_rules_on_tie():
    e = Election(((20, 4, 1), (20, 4, 1), (4, 20, 1), (4, 20, 1)))
    b = (0, 0, 1, 1)
    assert lottery(e, b, TieRule.RAND_CAND).probs == (F(1, 2), F(1, 2), 0)
    assert lottery(e, b, TieRule.LEX).probs == (1, 0, 0)


def test_lottery_random_voter_with_principled_voter():
    e = Election(((20, 4, 1), (20, 4, 1), (4, 20, 1), (4, 20, 1)))
    p = PrincipledProfile(((2, 0, 1),))
    b = (0, 0, 1, 1)
    assert lottery(e, b, TieRule.RAND_VOTER, p).probs == (F(3, 5), F(2, 5), 0)
    assert lottery(e, b, TieRule.RAND_CAND, p).probs == (F(1, 2), F(1, 2), 0)


def test_random_voter_abstainers_pick_their_favorite():
    e = Election(((1, 2, 3), (3, 2, 1), (1, 3, 2)))
    assert lottery(e, (0, 2, _), TieRule.RAND_VOTER).probs == (F(1, 3), 0, F(2, 3))


def test_invalid_trivial_policy():
    e = comparison()
    assert lottery(e, (_,) * 4, TieRule.LEX, policy=TrivialPolicy.INVALID) is None
    assert lottery(e, (_,) * 4, TieRule.LEX).probs == (1, 0, 0)


@pytest.mark.parametrize("p, value", [
    ((F(1, 2), F(1, 2), 0), 12),
    ((F(3, 5), F(2, 5), 0), F(68, 5)),
    ((0, 1, 0), 4),
])
def test_expected_utility(p, value):
    assert expected_utility((20, 4, 1), Lottery(p)) == value


def test_lottery_rejects_non_distribution():
    with pytest.raises(ValueError):
        Lottery((F(1, 2), F(1, 3)))
    with pytest.raises(ValueError):
        Lottery((F(3, 2), F(-1, 2)))


def test_format_ballots():
    assert format_ballots((1, _, 0)) == "(c2,-,c1)"


def _ballots(e, data):
    return tuple(data.draw(st.sampled_from([None] + list(range(e.m)))) for _ in range(e.n))


@settings(max_examples=300, deadline=None)
@given(elections(max_n=6, max_m=5), st.data())
def test_lottery_invariants(e, data):
    b = _ballots(e, data)
    board = scores(e, b)
    assert sum(board.scores) == sum(x is not None for x in b)
    total = e.n
    for rule in TieRule:
        p = lottery(e, b, rule)
        assert sum(p.probs) == 1
        assert set(p.support) <= set(board.W)
        if rule is TieRule.RAND_CAND:
            assert set(p.support) == set(board.W)
            assert all(x >= F(1, e.m) for x in p.probs if x)
        if rule is TieRule.RAND_VOTER:
            assert all(x >= F(1, total) for x in p.probs if x)
        if rule is TieRule.LEX:
            assert p.support == (board.W[0],)


@settings(max_examples=200, deadline=None)
@given(elections(max_n=5, max_m=4), st.data())
def test_random_voter_unanimous_choice_is_degenerate(e, data):
    b = _ballots(e, data)
    W = scores(e, b).W
    picks = {x if x in W else e.favorite_in(i, W) for i, x in enumerate(b)}
    if len(picks) == 1:
        (c,) = picks
        assert lottery(e, b, TieRule.RAND_VOTER).probs == Lottery.degenerate(e.m, c).probs


@settings(max_examples=200, deadline=None)
@given(elections(max_n=5, max_m=4), st.data())
def test_scores_permutation_equivariant(e, data):
    b = _ballots(e, data)
    perm = data.draw(st.permutations(range(e.m)))
    e2 = Election(tuple(tuple(u[perm.index(c)] for c in range(e.m)) for u in e.utilities))
    b2 = tuple(None if x is None else perm[x] for x in b)
    s1, s2 = scores(e, b), scores(e2, b2)
    assert all(s1.scores[c] == s2.scores[perm[c]] for c in range(e.m))
    assert sorted(perm[c] for c in s1.W) == list(s2.W)
    for rule in (TieRule.RAND_CAND, TieRule.RAND_VOTER):
        p1, p2 = lottery(e, b, rule), lottery(e2, b2, rule)
        assert all(p1[c] == p2[perm[c]] for c in range(e.m))
