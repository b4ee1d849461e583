"""Games with an extra block of principled voters who always vote their top choice.

The strategic voters are lazy (or truth-biased for the truthful check).  Several
conditions carry extra clauses covering deviations by abstaining voters, which
plain score counting misses even without any principled voter.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .characterizations import DEFAULT_SUBSET_BUDGET, _avg, _sorted_unique, _truth_lex_truthful
from .election import (
    ABSTAIN,
    EMPTY_PRINCIPLED,
    Ballot,
    BallotVector,
    Election,
    PrincipledProfile,
    ScoreBoard,
    TieRule,
    check_ballots,
    tally,
)
from .game import BudgetExceeded, GameSpec, Setting, is_pne

__all__ = [
    "PrincipledProfile",
    "combined_scores",
    "h_plus",
    "lazy_lex_principled_solve",
    "lazy_rc_principled_single",
    "lazy_rc_principled_single_pne",
    "lazy_rc_principled_tie",
    "lazy_rc_principled_pne",
    "truth_lex_principled_truthful",
]


def combined_scores(e: Election, b: Sequence[Ballot], p: PrincipledProfile = EMPTY_PRINCIPLED) -> ScoreBoard:
    check_ballots(e, b)
    p.validate(e.m)
    return tally(e.m, tuple(b) + p.tops)


def _base(e: Election, p: PrincipledProfile) -> ScoreBoard:
    p.validate(e.m)
    return tally(e.m, p.tops)


def h_plus(e: Election, p: PrincipledProfile) -> Tuple[int, ...]:
    """Members of H(a^P) ranked above the lexicographic winner of a^P."""
    board = _base(e, p)
    return tuple(c for c in board.H if c < board.W[0])


def _subsets(voters: Sequence[int], t: int, c: int, n: int) -> List[BallotVector]:
    out = []
    for D in itertools.combinations(voters, t):
        b = [ABSTAIN] * n
        for i in D:
            b[i] = c
        out.append(tuple(b))
    return out


@dataclass(frozen=True)
class PrincipledLexReport:
    winners: Tuple[int, ...]
    equilibria: Dict[int, Tuple[BallotVector, ...]]

    @property
    def exists(self) -> bool:
        return bool(self.winners)

    def all_equilibria(self) -> Tuple[BallotVector, ...]:
        return _sorted_unique(b for eqs in self.equilibria.values() for b in eqs)


def lazy_lex_principled_solve(e: Election, p: PrincipledProfile = EMPTY_PRINCIPLED) -> PrincipledLexReport:
    """Which candidates win some PNE of the lazy game with lexicographic ties.

    Let c_j be the lexicographic winner of the principled block alone.  c_j
    wins iff everyone abstaining is stable.  Another c_k wins iff enough voters
    in S (those preferring c_k to every rival that could overtake it) can lift
    c_k to the exact winning score, and no abstainer can hand the win to a
    candidate she prefers by adding one vote:

    * k > j: every lazy voter prefers c_k to every W(a^P) member above it;
    * k < j: every lazy voter prefers c_k to all of W(a^P) and to the
      H(a^P) members above it.

    In every PNE the active lazy voters all vote for the winner.
    """
    board = _base(e, p)
    n, m = e.n, e.m
    M, W, H = board.M, board.W, board.H
    sc = board.scores
    j = W[0]
    Hplus = [c for c in H if c < j]
    winners, eq = [], {}
    g = GameSpec(e, Setting.LAZY, TieRule.LEX, p)
    if is_pne(g, e.trivial()):
        winners.append(j)
        eq[j] = (e.trivial(),)
    for k in range(m):
        if k == j:
            continue
        if k > j:
            t = M + 1 - sc[k]
            blockers = [c for c in W if c < k]
        else:
            t = M - sc[k]
            blockers = list(W) + [c for c in H if c < k]
        if not all(e.prefers(i, k, c) for i in range(n) for c in blockers if c != k):
            continue
        rivals = [c for c in set(W) | set(Hplus) if c != k]
        S = [i for i in range(n) if all(e.prefers(i, k, c) for c in rivals)]
        if t < 1 or len(S) < t:
            continue
        winners.append(k)
        eq[k] = tuple(_subsets(S, t, k, n))
    winners.sort()
    return PrincipledLexReport(tuple(winners), eq)


def _vj(e: Election, p: PrincipledProfile, j: int, board: ScoreBoard) -> List[int]:
    W, H = board.W, board.H
    out = []
    for i in range(e.n):
        u = e.utilities[i]
        if not all(u[j] > u[c] for c in W if c != j):
            continue
        if all(u[j] >= _avg(u, set(W) | {j, l}) for l in H if l != j):
            out.append(i)
    return out


def lazy_rc_principled_single_pne(e: Election, p: PrincipledProfile, j: int) -> Tuple[BallotVector, ...]:
    """PNE of the lazy random-candidate game whose winning set is {c_j}.

    If c_j already wins the principled block alone, the only candidate PNE is
    everyone abstaining, stable iff every lazy voter prefers c_j to each
    member of H(a^P).  Otherwise exactly t = M + 1 - sc(c_j) voters from V_j
    must vote c_j, and every lazy voter must prefer c_j to the rest of W(a^P)
    so that no abstainer gains by joining a rival.
    """
    board = _base(e, p)
    n = e.n
    M, W, H = board.M, board.W, board.H
    sc = board.scores
    if W == (j,):
        if all(e.prefers(i, j, c) for i in range(n) for c in H):
            return (e.trivial(),)
        return ()
    if not all(e.prefers(i, j, c) for i in range(n) for c in W if c != j):
        return ()
    t = M + 1 - sc[j]
    V = _vj(e, p, j, board)
    if len(V) < t:
        return ()
    return tuple(_subsets(V, t, j, n))


def lazy_rc_principled_single(e: Election, p: PrincipledProfile, j: int) -> bool:
    return bool(lazy_rc_principled_single_pne(e, p, j))


@dataclass(frozen=True)
class PrincipledTieCertificate:
    """Tie set X, the lazy groups by favorite in X and the common score T."""

    X: Tuple[int, ...]
    groups: Tuple[Tuple[int, ...], ...]
    score: int

    def ballots(self, n: int) -> BallotVector:
        b = [ABSTAIN] * n
        for c, group in zip(self.X, self.groups):
            for i in group:
                b[i] = c
        return tuple(b)


@dataclass(frozen=True)
class PrincipledTieResult:
    exists: bool
    distinct_tops: bool
    certificates: Tuple[PrincipledTieCertificate, ...]

    def equilibria(self, e: Election) -> Tuple[BallotVector, ...]:
        eq = [c.ballots(e.n) for c in self.certificates]
        if self.distinct_tops:
            eq.append(e.tops)
        return _sorted_unique(eq)


def lazy_rc_principled_tie(e: Election, p: PrincipledProfile = EMPTY_PRINCIPLED,
                           budget: int = DEFAULT_SUBSET_BUDGET) -> PrincipledTieResult:
    """PNE with a tie, lazy voters, random-candidate rule.

    Condition (1): all n + s tops are distinct and each lazy voter weakly
    prefers the uniform lottery over them to any other top winning alone.
    Condition (2): a set X of size >= 2 whose members all reach a common
    score T >= 2 when every lazy voter votes her favorite in X, with every
    outside candidate below T; each lazy voter weakly prefers the lottery
    over X to her best alternative inside X and to swapping her favorite
    for an outside candidate at T - 1.  The total n' = kT may exceed n.
    """
    p.validate(e.m)
    board = _base(e, p)
    n, m = e.n, e.m
    sc = board.scores
    alltops = e.tops + p.tops
    distinct = len(alltops) >= 2 and len(set(alltops)) == len(alltops)
    if distinct:
        for l, u in enumerate(e.utilities):
            others = [u[t] for i, t in enumerate(alltops) if i != l]
            if _avg(u, alltops) < max(others):
                distinct = False
                break
    required = 2 ** m
    if required > budget:
        raise BudgetExceeded(required, budget, "candidate subsets")
    certs = []
    for k in range(2, m + 1):
        for X in itertools.combinations(range(m), k):
            cert = _tie_certificate(e, sc, X)
            if cert is not None:
                certs.append(cert)
    return PrincipledTieResult(distinct or bool(certs), distinct, tuple(certs))


def _tie_certificate(e: Election, sc: Sequence[int], X: Tuple[int, ...]) -> Optional[PrincipledTieCertificate]:
    groups = {c: [] for c in X}
    for i in range(e.n):
        groups[e.favorite_in(i, X)].append(i)
    totals = {len(groups[c]) + sc[c] for c in X}
    if len(totals) != 1:
        return None
    T = totals.pop()
    if T < 2:
        return None
    outside = [c for c in range(e.m) if c not in X]
    if any(sc[c] >= T for c in outside):
        return None
    near = [c for c in outside if sc[c] == T - 1]
    for x, group in groups.items():
        for i in group:
            u = e.utilities[i]
            avg = _avg(u, X)
            if avg < max(u[d] for d in X if d != x):
                return None
            rest = [d for d in X if d != x]
            if any(avg < _avg(u, rest + [c]) for c in near):
                return None
    return PrincipledTieCertificate(X, tuple(tuple(groups[c]) for c in X), T)


def lazy_rc_principled_pne(e: Election, p: PrincipledProfile = EMPTY_PRINCIPLED,
                           budget: int = DEFAULT_SUBSET_BUDGET) -> Tuple[BallotVector, ...]:
    """Full PNE set of the lazy random-candidate game with principled voters."""
    eq = list(lazy_rc_principled_tie(e, p, budget).equilibria(e))
    for j in range(e.m):
        eq.extend(lazy_rc_principled_single_pne(e, p, j))
    return _sorted_unique(eq)


def truth_lex_principled_truthful(e: Election, p: PrincipledProfile = EMPTY_PRINCIPLED) -> bool:
    """Whether truthful voting is a PNE of the truth-biased lexicographic game."""
    p.validate(e.m)
    return _truth_lex_truthful(e, tally(e.m, e.tops + p.tops))
