"""ExistNE / TieNE / SingleNE, additive price of anarchy and named example profiles."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional, Tuple

from .characterizations import (
    DEFAULT_SUBSET_BUDGET,
    characterized_pne,
    check_rand_unanimity,
    lazy_lex_solve,
    lazy_rand_solve,
    truth_lex_canonical_search,
    truth_rand_single_search,
    truth_rand_tie_solve,
    truthful_pne_truth_lex,
    truthful_single_pne,
)
from .election import (
    ABSTAIN,
    BallotVector,
    Election,
    PrincipledProfile,
    TieRule,
    TrivialPolicy,
    lottery,
    tally,
    utilities_from_ranking,
)
from .game import DEFAULT_BUDGET, GameSpec, Setting, ballot_key, enumerate_pne


class Problem(Enum):
    EXIST = "exist-ne"
    TIE = "tie-ne"
    SINGLE = "single-ne"


@dataclass(frozen=True)
class DecisionQuery:
    problem: Problem
    setting: Setting
    rule: TieRule
    target: Optional[int] = None

    def __post_init__(self):
        needs = self.problem is not Problem.EXIST
        if needs and self.target is None:
            raise ValueError(f"{self.problem.value} needs a target candidate")
        if not needs and self.target is not None:
            raise ValueError("exist-ne takes no target")


@dataclass(frozen=True)
class DecisionResult:
    """``complete`` is True when a negative answer comes from an exhausted search."""

    answer: bool
    witness: Optional[BallotVector]
    method: str
    complete: bool = True


def _matches(q: DecisionQuery, m: int) -> Callable[[BallotVector], bool]:
    def pred(b):
        W = tally(m, b).W
        if q.problem is Problem.EXIST:
            return True
        if q.problem is Problem.TIE:
            return len(W) > 1 and q.target in W
        return W == (q.target,)

    return pred


def _matches_with(q: DecisionQuery, m: int, p: PrincipledProfile) -> Callable[[BallotVector], bool]:
    inner = _matches(q, m)
    return lambda b: inner(tuple(b) + p.tops)


def _first(cands: Iterable[BallotVector], pred) -> Optional[BallotVector]:
    hits = sorted((b for b in cands if pred(b)), key=ballot_key)
    return hits[0] if hits else None


def _result(witness, method) -> DecisionResult:
    return DecisionResult(witness is not None, witness, method, True)


def decide(q: DecisionQuery, e: Election, budget: int = DEFAULT_BUDGET,
           principled: PrincipledProfile = PrincipledProfile()) -> DecisionResult:
    """Answer a decision query.

    Raises BudgetExceeded when the search it needs is too large: an answer
    of False always means the search space was exhausted.  Games with
    principled voters are answered by the brute-force oracle.
    """
    if q.target is not None and not 0 <= q.target < e.m:
        raise ValueError(f"target index {q.target} out of range")
    pred = _matches(q, e.m)
    if principled.s:
        pred = _matches_with(q, e.m, principled)
        g = GameSpec(e, q.setting, q.rule, principled)
        return _result(_first(enumerate_pne(g, budget), pred), "oracle")
    lazy = q.setting is Setting.LAZY
    if lazy and q.rule is TieRule.LEX:
        return _result(_first(lazy_lex_solve(e).equilibria, pred), "poly")
    if lazy:
        if q.problem is Problem.SINGLE:
            u = check_rand_unanimity(e)
            w = None
            if u == q.target:
                if q.rule is TieRule.RAND_CAND and e.m > 1:
                    w = tuple(q.target if i == 0 else ABSTAIN for i in range(e.n))
                elif e.m == 1:
                    w = e.trivial()
            return _result(w, "poly")
        sub = min(budget, DEFAULT_SUBSET_BUDGET)
        return _result(_first(lazy_rand_solve(e, q.rule, sub).equilibria, pred), "search")
    a = e.tops
    if q.rule is TieRule.LEX:
        if truthful_pne_truth_lex(e) and pred(a):
            return _result(a, "poly")
        winners = [q.target] if q.problem is Problem.SINGLE else None
        return _result(_first(truth_lex_canonical_search(e, winners, budget), pred), "search")
    if q.problem is not Problem.SINGLE:
        sub = min(budget, DEFAULT_SUBSET_BUDGET)
        w = _first(truth_rand_tie_solve(e, q.rule, sub).equilibria, pred)
        if w is not None or q.problem is Problem.TIE:
            return _result(w, "search")
    if truthful_single_pne(e, q.rule) and pred(a):
        return _result(a, "poly")
    target = q.target if q.problem is Problem.SINGLE else None
    return _result(_first(truth_rand_single_search(e, q.rule, target, budget), pred), "search")


@dataclass(frozen=True)
class PoAReport:
    truthful_winner_score: int
    worst_pne_winner_truthful_score: Optional[int]
    gap: Optional[int]
    witness: Optional[BallotVector]
    defined: bool
    pne_count: int = 0


def poa_additive(g: GameSpec, budget: int = DEFAULT_BUDGET) -> PoAReport:
    """Truthful winning score minus the worst truthful score of a PNE winner.

    A PNE with a non-degenerate lottery is scored by its worst support member.
    Truthful scores include the principled block.
    """
    e, p = g.election, g.principled
    truthful = tally(e.m, e.tops + p.tops).scores
    M = max(truthful)
    plain = p.s == 0 and g.trivial_policy is TrivialPolicy.FULL_TIE
    pne = characterized_pne(g.setting, g.rule, e, budget) if plain else enumerate_pne(g, budget)
    worst, witness = None, None
    for b in pne:
        lot = lottery(e, b, g.rule, p, g.trivial_policy)
        if lot is None:
            continue
        score = min(truthful[c] for c in lot.support)
        if worst is None or score < worst:
            worst, witness = score, b
    if worst is None:
        return PoAReport(M, None, None, None, False, len(pne))
    return PoAReport(M, worst, M - worst, witness, True, len(pne))


def _ranked(rankings) -> Election:
    return Election(tuple(utilities_from_ranking(r) for r in rankings))


def gen_lazy_poa(n: int) -> Election:
    """n voters, n candidates; one voter tops c2, the rest top c3 then c2, c1."""
    if n < 3:
        raise ValueError("gen_lazy_poa needs n >= 3")
    tail = list(range(n - 1, 2, -1))
    first = [1] + tail + [2, 0]
    rest = [2, 1, 0] + tail
    return _ranked([first] + [rest] * (n - 1))


def gen_truth_poa(n: int) -> Election:
    """Three blocks over three candidates; the middle block can elect c2."""
    if n < 6 or n % 3:
        raise ValueError("gen_truth_poa needs n >= 6 divisible by 3")
    q = n // 3
    return _ranked([[0, 1, 2]] * q + [[2, 1, 0]] * (q + 1) + [[2, 1, 0]] * (q - 1))


def truth_poa_witness(n: int) -> BallotVector:
    q = n // 3
    return (0,) * q + (1,) * (q + 1) + (2,) * (q - 1)


def gen_comparison_example() -> Election:
    """One voter c2 > c3 > c1 and three voters c3 > c2 > c1."""
    return _ranked([[1, 2, 0]] + [[2, 1, 0]] * 3)


def gen_rc_vs_rv() -> Tuple[Election, PrincipledProfile]:
    """Four lazy voters and one principled voter where the two random rules differ.

    Two lazy voters have utilities (20, 4, 1) and two have (4, 20, 1); the
    principled voter ranks c3 > c1 > c2.  At (c1, c1, c2, c2) the
    random-candidate lottery is (1/2, 1/2, 0) and the random-voter lottery is
    (3/5, 2/5, 0).  Mirrored utilities for the second pair are required: with
    both pairs at (20, 4, 1) a c2-voter would switch to c1.
    """
    u, v = (20, 4, 1), (4, 20, 1)
    return Election((u, u, v, v)), PrincipledProfile(((2, 0, 1),))


RC_VS_RV_WITNESS: BallotVector = (0, 0, 1, 1)
