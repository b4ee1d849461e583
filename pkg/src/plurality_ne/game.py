"""Strategic layer: perturbed utilities, PNE verification and the brute-force oracle."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .election import (
    ABSTAIN,
    EMPTY_PRINCIPLED,
    Ballot,
    BallotVector,
    Election,
    InvalidProfileError,
    Lottery,
    PrincipledProfile,
    TieRule,
    TrivialPolicy,
    check_ballots,
    lottery,
    tally,
)

DEFAULT_BUDGET = 10 ** 7


class Setting(Enum):
    LAZY = "lazy"
    TRUTH = "truth"


class BudgetExceeded(Exception):
    """The requested search is larger than the allowed budget."""

    def __init__(self, required: int, budget: int, what: str = "ballot vectors"):
        super().__init__(f"search needs {required} {what}, budget is {budget}")
        self.required = required
        self.budget = budget


@dataclass(frozen=True)
class GameSpec:
    election: Election
    setting: Setting
    rule: TieRule
    principled: PrincipledProfile = EMPTY_PRINCIPLED
    trivial_policy: TrivialPolicy = TrivialPolicy.FULL_TIE

    def __post_init__(self):
        self.principled.validate(self.election.m)


@dataclass(frozen=True, order=True)
class PerturbedValue:
    """Expected utility plus an infinitesimal bonus, ordered lexicographically.

    Minus infinity is the single value with ``finite=False``; it sorts below
    every finite value.
    """

    finite: bool
    base: Fraction = Fraction(0)
    bonus: bool = False

    def __post_init__(self):
        if not self.finite:
            object.__setattr__(self, "base", Fraction(0))
            object.__setattr__(self, "bonus", False)
        else:
            object.__setattr__(self, "base", Fraction(self.base))

    @property
    def is_minus_infinity(self) -> bool:
        return not self.finite

    def __str__(self):
        if not self.finite:
            return "-inf"
        return f"{self.base}{' +eps' if self.bonus else ''}"


MINUS_INFINITY = PerturbedValue(False)


class _Evaluator:
    """Integer-scaled utilities for one game.

    Expected utilities are multiplied by a common denominator so that all
    comparisons in the hot loop are between tuples of ints.
    """

    def __init__(self, g: GameSpec):
        e = g.election
        self.g = g
        self.e = e
        self.m, self.n = e.m, e.n
        self.u = e.utilities
        self.tops = e.tops
        self.lazy = g.setting is Setting.LAZY
        self.rule = g.rule
        self.invalid_trivial = g.trivial_policy is TrivialPolicy.INVALID
        self.ptops = g.principled.tops
        self.prank = g.principled.rankings
        self.total = self.n + g.principled.s
        self.scale = math.lcm(*range(1, self.m + 1), self.total)
        self.pscore = [0] * self.m
        for t in self.ptops:
            self.pscore[t] += 1

    def winners(self, b: Sequence[Ballot]):
        sc = list(self.pscore)
        for x in b:
            if x is not None:
                sc[x] += 1
        M = max(sc)
        if M == 0:
            return None, tuple(range(self.m)), sc
        return M, tuple(c for c in range(self.m) if sc[c] == M), sc

    def base_all(self, b: Sequence[Ballot]):
        """Scaled expected utility of every strategic voter, or None if void."""
        M, W, _ = self.winners(b)
        if M is None and self.invalid_trivial:
            return None
        u = self.u
        if self.rule is TieRule.LEX:
            w = W[0]
            return [ui[w] * self.scale for ui in u]
        if self.rule is TieRule.RAND_CAND or len(W) == 1:
            k = self.scale // len(W)
            return [sum(ui[c] for c in W) * k for ui in u]
        cnt = self._selection(b, W)
        k = self.scale // self.total
        return [sum(ui[c] * cnt[c] for c in W) * k for ui in u]

    def _selection(self, b, W):
        cnt = [0] * self.m
        Wset = set(W)
        for i, x in enumerate(b):
            if x in Wset:
                cnt[x] += 1
            else:
                ui = self.u[i]
                cnt[max(W, key=ui.__getitem__)] += 1
        for t, top in enumerate(self.ptops):
            if top in Wset:
                cnt[top] += 1
            else:
                for c in self.prank[t]:
                    if c in Wset:
                        cnt[c] += 1
                        break
        return cnt

    def base_one(self, b: Sequence[Ballot], i: int):
        M, W, _ = self.winners(b)
        if M is None and self.invalid_trivial:
            return None
        ui = self.u[i]
        if self.rule is TieRule.LEX:
            return ui[W[0]] * self.scale
        if self.rule is TieRule.RAND_CAND or len(W) == 1:
            return sum(ui[c] for c in W) * (self.scale // len(W))
        cnt = self._selection(b, W)
        return sum(ui[c] * cnt[c] for c in W) * (self.scale // self.total)

    def key(self, b: Sequence[Ballot], i: int, base) -> tuple:
        x = b[i]
        if base is None:
            return (False, 0, False)
        if self.lazy:
            return (True, base, x is None)
        if x is None:
            return (False, 0, False)
        return (True, base, x == self.tops[i])

    def value(self, b: Sequence[Ballot], i: int) -> tuple:
        return self.key(b, i, self.base_one(b, i))

    def first_improvement(self, b: Sequence[Ballot]) -> Optional[Tuple[int, Ballot]]:
        bases = self.base_all(b)
        options = list(range(self.m)) + [None]
        blist = list(b)
        for i in range(self.n):
            cur = self.key(b, i, None if bases is None else bases[i])
            orig = blist[i]
            for y in options:
                if y == orig:
                    continue
                blist[i] = y
                if self.value(blist, i) > cur:
                    blist[i] = orig
                    return (i, y)
            blist[i] = orig
        return None

    def to_value(self, key: tuple) -> PerturbedValue:
        if not key[0]:
            return MINUS_INFINITY
        return PerturbedValue(True, Fraction(key[1], self.scale), key[2])


def perturbed_utility(g: GameSpec, b: Sequence[Ballot], i: int) -> PerturbedValue:
    check_ballots(g.election, b)
    if not 0 <= i < g.election.n:
        raise IndexError(f"voter index {i} out of range")
    ev = _Evaluator(g)
    return ev.to_value(ev.value(b, i))


@dataclass(frozen=True)
class Verdict:
    is_equilibrium: bool
    witness: Optional[Tuple[int, Ballot]] = None

    def __bool__(self):
        return self.is_equilibrium


def is_pne(g: GameSpec, b: Sequence[Ballot]) -> Verdict:
    """Check every unilateral deviation of every strategic voter.

    The witness is the first strictly improving deviation, scanning voters
    in order and, per voter, candidates by index with abstention last.
    """
    check_ballots(g.election, b)
    w = _Evaluator(g).first_improvement(tuple(b))
    return Verdict(w is None, w)


def _lazy_cheap_reject(ev: _Evaluator, b) -> bool:
    M, W, sc = ev.winners(b)
    if M is None:
        return False
    for x in b:
        if x is not None and sc[x] != M:
            # abstaining keeps the lottery and earns the bonus
            return True
    if len(W) == 1:
        w = W[0]
        second = max((sc[c] for c in range(ev.m) if c != w), default=0)
        if M - 1 > second and w in b:
            return True
    return False


def _truth_cheap_reject(ev: _Evaluator, b) -> bool:
    M, W, sc = ev.winners(b)
    tops = ev.tops
    for i, x in enumerate(b):
        if x != tops[i] and sc[x] != M:
            # switching back to the top never hurts and earns the bonus
            return True
    return False


def _space(g: GameSpec) -> int:
    return (g.election.m + 1) ** g.election.n


def iter_pne(g: GameSpec, budget: int = DEFAULT_BUDGET):
    """Yield PNE in lexicographic order (candidates by index, abstain last)."""
    required = _space(g)
    if required > budget:
        raise BudgetExceeded(required, budget)
    ev = _Evaluator(g)
    m, n = ev.m, ev.n
    if ev.lazy:
        options = list(range(m)) + [None]
        reject = _lazy_cheap_reject
    else:
        # abstaining is -inf while any vote is finite
        options = list(range(m))
        reject = _truth_cheap_reject
    for b in itertools.product(options, repeat=n):
        if reject(ev, b):
            continue
        if ev.first_improvement(b) is None:
            yield b


def enumerate_pne(g: GameSpec, budget: int = DEFAULT_BUDGET) -> List[BallotVector]:
    return list(iter_pne(g, budget))


@dataclass(frozen=True, order=True)
class Outcome:
    winning_set: Tuple[int, ...]
    lottery: Tuple[Fraction, ...]


def outcome_of(g: GameSpec, b: Sequence[Ballot]) -> Optional[Outcome]:
    e = g.election
    board = tally(e.m, tuple(b) + g.principled.tops)
    p = lottery(e, b, g.rule, g.principled, g.trivial_policy)
    if p is None:
        return None
    return Outcome(board.W, p.probs)


def pne_outcomes(g: GameSpec, budget: int = DEFAULT_BUDGET) -> List[Outcome]:
    """Distinct (winning set, lottery) pairs over all PNE, sorted."""
    outs = {outcome_of(g, b) for b in iter_pne(g, budget)}
    return sorted(o for o in outs if o is not None)


def ballot_key(b: Sequence[Ballot]) -> tuple:
    """Sort key matching the enumeration order (abstain after every candidate)."""
    return tuple(float("inf") if x is None else x for x in b)
