"""Closed-form equilibrium characterizations for the six (setting, rule) pairs.

Each solver returns the exact PNE set it derives, so every function here can
be checked against the brute-force oracle in :mod:`plurality_ne.game`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .election import (
    ABSTAIN,
    Ballot,
    BallotVector,
    Election,
    TieRule,
    check_ballots,
    expected_utility,
    lottery,
    scores,
    tally,
)
from .game import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    GameSpec,
    Setting,
    ballot_key,
    is_pne,
)

DEFAULT_SUBSET_BUDGET = 10 ** 6


class NotApplicable(ValueError):
    """A characterization was called outside its precondition."""


class NotSingleWinner(NotApplicable):
    pass


class TruthfulBallot(NotApplicable):
    pass


def _sorted_unique(vectors) -> Tuple[BallotVector, ...]:
    return tuple(sorted(set(map(tuple, vectors)), key=ballot_key))


def _solo(n: int, i: int, c: int) -> BallotVector:
    return tuple(c if k == i else ABSTAIN for k in range(n))


# lazy voters, lexicographic tie-breaking

@dataclass(frozen=True)
class LazyLexResult:
    exists: bool
    winner: Optional[int]
    equilibria: Tuple[BallotVector, ...]


def lazy_lex_solve(e: Election) -> LazyLexResult:
    """All PNE of the lazy game with lexicographic ties.

    Either everyone ranks c1 first and only the trivial ballot is stable, or a
    unique c_j (j > 1) with truthful support that everyone prefers to all
    lower-index candidates wins, with exactly one of its supporters voting.
    """
    tops = e.tops
    n = e.n
    if all(t == 0 for t in tops):
        return LazyLexResult(True, 0, (e.trivial(),))
    sc = tally(e.m, tops).scores
    for j in range(1, e.m):
        if sc[j] == 0:
            continue
        if all(e.prefers(i, j, k) for i in range(n) for k in range(j)):
            eq = tuple(_solo(n, i, j) for i in range(n) if tops[i] == j)
            return LazyLexResult(True, j, _sorted_unique(eq))
    return LazyLexResult(False, None, ())


# randomized tie-breaking, shared pieces

def check_rand_unanimity(e: Election) -> Optional[int]:
    tops = set(e.tops)
    return tops.pop() if len(tops) == 1 else None


def _avg(u: Sequence[int], cands) -> Fraction:
    cands = list(cands)
    return Fraction(sum(u[c] for c in cands), len(cands))


def check_rand_singleton_votes(e: Election) -> bool:
    """Distinct tops, and every voter likes the uniform lottery over all tops
    at least as much as any other voter's top winning outright."""
    tops = e.tops
    if len(set(tops)) != len(tops):
        return False
    for l, u in enumerate(e.utilities):
        others = [u[t] for i, t in enumerate(tops) if i != l]
        if others and _avg(u, tops) < max(others):
            return False
    return True


@dataclass(frozen=True)
class TieSetCertificate:
    """A set X and the forced partition of voters by favorite within X."""

    X: Tuple[int, ...]
    groups: Tuple[Tuple[int, ...], ...]

    def ballots(self, n: int) -> BallotVector:
        b = [ABSTAIN] * n
        for c, group in zip(self.X, self.groups):
            for i in group:
                b[i] = c
        return tuple(b)


def _tie_sizes(n: int, m: int) -> List[int]:
    return [k for k in range(2, min(n // 2, m) + 1) if n % k == 0]


def find_tie_sets(e: Election, budget: int = DEFAULT_SUBSET_BUDGET) -> List[TieSetCertificate]:
    """Every X whose forced partition is balanced and passes the lottery test.

    Each voter must vote her favorite in X (otherwise she could make it win
    alone), so the partition is determined by X and never searched.
    """
    n, m = e.n, e.m
    sizes = _tie_sizes(n, m)
    required = sum(comb(m, k) for k in sizes)
    if required > budget:
        raise BudgetExceeded(required, budget, "candidate subsets")
    found = []
    for k in sizes:
        for X in itertools.combinations(range(m), k):
            groups = {c: [] for c in X}
            for i in range(n):
                groups[e.favorite_in(i, X)].append(i)
            if any(len(g) != n // k for g in groups.values()):
                continue
            ok = True
            for c, group in groups.items():
                for i in group:
                    u = e.utilities[i]
                    if _avg(u, X) < max(u[d] for d in X if d != c):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                found.append(TieSetCertificate(X, tuple(tuple(groups[c]) for c in X)))
    return found


@dataclass(frozen=True)
class FamilyResult:
    """Which conditions hold, and the resulting PNE set."""

    exists: bool
    families: Tuple[str, ...]
    equilibria: Tuple[BallotVector, ...]
    tie_sets: Tuple[TieSetCertificate, ...] = ()


def _check_rand_rule(rule: TieRule) -> None:
    if rule is TieRule.LEX:
        raise NotApplicable("randomized tie-breaking rule required")


def lazy_rand_solve(e: Election, rule: TieRule, budget: int = DEFAULT_SUBSET_BUDGET) -> FamilyResult:
    """All PNE of the lazy game under random-candidate or random-voter ties.

    Degenerate sizes: with one candidate only the trivial ballot is stable
    (a lone voter prefers abstaining to re-electing the only candidate), and
    a single voter is never stable voting under the random-voter rule, since
    abstaining still elects her favorite.
    """
    _check_rand_rule(rule)
    n, m = e.n, e.m
    families, eq = [], []
    unanimous = check_rand_unanimity(e)
    if unanimous is not None:
        families.append("unanimity")
        if rule is TieRule.RAND_CAND and m > 1:
            eq.extend(_solo(n, i, unanimous) for i in range(n))
        else:
            eq.append(e.trivial())
    if check_rand_singleton_votes(e):
        families.append("singleton-votes")
        if n >= 2:
            eq.append(e.tops)
    ties = find_tie_sets(e, budget)
    if ties:
        families.append("tie-sets")
        eq.extend(t.ballots(n) for t in ties)
    eq = _sorted_unique(eq)
    return FamilyResult(bool(eq), tuple(families), eq, tuple(ties))


# truth-biased voters, lexicographic tie-breaking

def truthful_pne_truth_lex(e: Election) -> bool:
    a = e.tops
    board = tally(e.m, a)
    return _truth_lex_truthful(e, board)


def _truth_lex_truthful(e: Election, board) -> bool:
    a = e.tops
    W, H = board.W, board.H
    j = W[0]
    for i in range(e.n):
        if len(W) > 1:
            for k in W:
                if a[i] != k and e.prefers(i, k, j):
                    return False
        for k in H:
            if k < j and a[i] != k and e.prefers(i, k, j):
                return False
    return True


def threshold_set(e: Election, b: Sequence[Ballot]) -> frozenset:
    """Candidates that would become the lexicographic winner with one more vote."""
    board = scores(e, b)
    sc = board.scores
    j = board.W[0]
    return frozenset(
        k for k in range(e.m)
        if (k < j and sc[k] == sc[j] - 1) or (k > j and sc[k] == sc[j])
    )


def _deviation_vectors(e: Election, c: int) -> Iterator[BallotVector]:
    """Non-truthful vectors where some non-supporters of c switch to c."""
    a = e.tops
    movers = [i for i in range(e.n) if a[i] != c]
    for r in range(1, len(movers) + 1):
        for D in itertools.combinations(movers, r):
            b = list(a)
            for i in D:
                b[i] = c
            yield tuple(b)


def _deviation_space(e: Election) -> int:
    sc = tally(e.m, e.tops).scores
    return sum(2 ** (e.n - sc[c]) - 1 for c in range(e.m))


def truth_lex_pne_search(e: Election, budget: int = DEFAULT_BUDGET) -> Tuple[BallotVector, ...]:
    """Non-truthful PNE of the truth-biased game with lexicographic ties.

    In such a PNE each voter votes her top or the winner, so it suffices to
    try every winner c and every set of non-supporters switching to c.
    Candidates failing the threshold condition are skipped before the full check.
    """
    required = _deviation_space(e)
    if required > budget:
        raise BudgetExceeded(required, budget)
    a = e.tops
    g = GameSpec(e, Setting.TRUTH, TieRule.LEX)
    sc_a = tally(e.m, a).scores
    found = []
    for c in range(e.m):
        for b in _deviation_vectors(e, c):
            board = tally(e.m, b)
            if board.W[0] != c:
                continue
            T = threshold_set(e, b)
            if not T or any(board.scores[k] != sc_a[k] for k in T):
                continue
            if is_pne(g, b):
                found.append(b)
    return _sorted_unique(found)


def _voter_types(e: Election, c: int) -> List[List[int]]:
    """Non-supporters of c grouped by identical utility vectors."""
    groups: Dict[Tuple[int, ...], List[int]] = {}
    for i, u in enumerate(e.utilities):
        if e.tops[i] != c:
            groups.setdefault(u, []).append(i)
    return list(groups.values())


def _switch_limit(sc_a: Sequence[int], c: int) -> int:
    # a switcher who returns to her top must unseat c, so some rival ends
    # within two votes of c; rivals only lose votes by switching
    rivals = [x for k, x in enumerate(sc_a) if k != c]
    return max(rivals, default=0) + 2 - sc_a[c]


def _bounded_counts(caps: Sequence[int], limit: int) -> Iterator[Tuple[int, ...]]:
    if not caps:
        yield ()
        return
    for k in range(min(caps[0], limit) + 1):
        for rest in _bounded_counts(caps[1:], limit - k):
            yield (k,) + rest


def _count_bounded(caps: Sequence[int], limit: int) -> int:
    if limit < 0:
        return 0
    ways = [1] + [0] * limit
    for cap in caps:
        nxt = [0] * (limit + 1)
        for total, w in enumerate(ways):
            if w:
                for k in range(min(cap, limit - total) + 1):
                    nxt[total + k] += w
        ways = nxt
    return sum(ways)


def canonical_space(e: Election, winners: Optional[Sequence[int]] = None) -> int:
    sc_a = tally(e.m, e.tops).scores
    total = 0
    for c in range(e.m) if winners is None else winners:
        caps = [len(grp) for grp in _voter_types(e, c)]
        total += _count_bounded(caps, _switch_limit(sc_a, c))
    return total


def _lex_winner(sc: Sequence[int]) -> int:
    return max(range(len(sc)), key=lambda x: (sc[x], -x))


def truth_lex_canonical_search(e: Election, winners: Optional[Sequence[int]] = None,
                               budget: int = DEFAULT_BUDGET) -> Iterator[BallotVector]:
    """Non-truthful PNE of the truth-biased lexicographic game, one per orbit.

    Voters with equal utilities are interchangeable, so only the number of
    each type switching to the winner matters; the first voters of a type
    are the ones that switch.  Every PNE is a relabeling of some yielded
    vector, which is enough for existence questions.  Each switcher must be
    pivotal, which bounds the number of switchers.
    """
    required = canonical_space(e, winners)
    if required > budget:
        raise BudgetExceeded(required, budget)
    a = e.tops
    g = GameSpec(e, Setting.TRUTH, TieRule.LEX)
    sc_a = tally(e.m, a).scores
    for c in range(e.m) if winners is None else winners:
        types = _voter_types(e, c)
        limit = _switch_limit(sc_a, c)
        for counts in _bounded_counts([len(grp) for grp in types], limit):
            moved = sum(counts)
            if not moved:
                continue
            sc = list(sc_a)
            sc[c] += moved
            for grp, k in zip(types, counts):
                sc[a[grp[0]]] -= k
            if _lex_winner(sc) != c:
                continue
            pivotal = True
            for grp, k in zip(types, counts):
                if not k:
                    continue
                x = a[grp[0]]
                sc[c] -= 1
                sc[x] += 1
                w = _lex_winner(sc)
                sc[c] += 1
                sc[x] -= 1
                if w == c or not e.prefers(grp[0], c, w):
                    pivotal = False
                    break
            if not pivotal:
                continue
            b = list(a)
            for grp, k in zip(types, counts):
                for i in grp[:k]:
                    b[i] = c
            b = tuple(b)
            T = threshold_set(e, b)
            if not T or any(sc[k] != sc_a[k] for k in T):
                continue
            if is_pne(g, b):
                yield b


# truth-biased voters, randomized tie-breaking

def truth_rand_tie_solve(e: Election, rule: TieRule, budget: int = DEFAULT_SUBSET_BUDGET) -> FamilyResult:
    """PNE whose winning set has at least two members."""
    _check_rand_rule(rule)
    families, eq = [], []
    if check_rand_singleton_votes(e):
        families.append("singleton-votes")
        if e.n >= 2:
            eq.append(e.tops)
    ties = find_tie_sets(e, budget)
    if ties:
        families.append("tie-sets")
        eq.extend(t.ballots(e.n) for t in ties)
    eq = _sorted_unique(eq)
    return FamilyResult(bool(eq), tuple(families), eq, tuple(ties))


def truth_rand_truthful_single(e: Election, rule: TieRule) -> bool:
    _check_rand_rule(rule)
    a = e.tops
    board = tally(e.m, a)
    if len(board.W) != 1:
        raise NotSingleWinner("truthful winning set is not a singleton")
    j = board.W[0]
    return all(e.prefers(i, j, k) for i in range(e.n) for k in board.H if k != a[i])


def verify_truth_rand_single(e: Election, rule: TieRule, b: Sequence[Ballot]) -> bool:
    """Four-condition test for a non-truthful PNE with a single winner.

    The fourth condition compares perturbed values: a deviation to c_l that
    produces the tie lottery is profitable if it raises expected utility, or
    keeps it equal while moving the voter back to her top.
    """
    _check_rand_rule(rule)
    check_ballots(e, b)
    b = tuple(b)
    a = e.tops
    board = tally(e.m, b)
    if len(board.W) != 1:
        raise NotSingleWinner("winning set is not a singleton")
    if b == a:
        raise TruthfulBallot("ballot vector is truthful")
    j = board.W[0]
    if any(b[i] not in (a[i], j) for i in range(e.n)):
        return False
    if not board.H:
        return False
    for i in range(e.n):
        for k in board.H:
            if k != b[i] and not e.prefers(i, j, k):
                return False
    for l in board.Hprime:
        for i in range(e.n):
            if b[i] != j:
                continue
            dev = b[:i] + (l,) + b[i + 1:]
            eu = expected_utility(e.utilities[i], lottery(e, dev, rule))
            stay = (Fraction(e.utilities[i][j]), j == a[i])
            if (eu, l == a[i]) > stay:
                return False
    return True


def truth_rand_single_search(e: Election, rule: TieRule, target: Optional[int] = None,
                             budget: int = DEFAULT_BUDGET) -> Tuple[BallotVector, ...]:
    """Non-truthful single-winner PNE, optionally restricted to one winner."""
    _check_rand_rule(rule)
    required = _deviation_space(e)
    if required > budget:
        raise BudgetExceeded(required, budget)
    found = []
    for c in range(e.m) if target is None else (target,):
        for b in _deviation_vectors(e, c):
            W = tally(e.m, b).W
            if W == (c,) and verify_truth_rand_single(e, rule, b):
                found.append(b)
    return _sorted_unique(found)


def truthful_single_pne(e: Election, rule: TieRule) -> bool:
    if len(tally(e.m, e.tops).W) != 1:
        return False
    return truth_rand_truthful_single(e, rule)


# full PNE sets

def characterized_pne(setting: Setting, rule: TieRule, e: Election,
                      budget: int = DEFAULT_BUDGET) -> Tuple[BallotVector, ...]:
    """The exact PNE set implied by the characterizations (no principled voters)."""
    if setting is Setting.LAZY:
        if rule is TieRule.LEX:
            return lazy_lex_solve(e).equilibria
        return lazy_rand_solve(e, rule).equilibria
    if rule is TieRule.LEX:
        eq = list(truth_lex_pne_search(e, budget))
        if truthful_pne_truth_lex(e):
            eq.append(e.tops)
        return _sorted_unique(eq)
    eq = list(truth_rand_tie_solve(e, rule).equilibria)
    if truthful_single_pne(e, rule):
        eq.append(e.tops)
    eq.extend(truth_rand_single_search(e, rule, budget=budget))
    return _sorted_unique(eq)
