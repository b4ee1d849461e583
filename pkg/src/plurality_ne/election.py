"""Election model: utilities, ballots, scores, winning sets and tie-breaking lotteries.

Candidates are 0-based indices; index order is the lexicographic tie-break
priority (candidate 0 wins every lexicographic tie it takes part in).  A
ballot is a candidate index or ``ABSTAIN`` (``None``).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Tuple

ABSTAIN = None

Ballot = Optional[int]
BallotVector = Tuple[Ballot, ...]


class InvalidProfileError(ValueError):
    """Raised for malformed utilities, rankings or ballots."""


class TieRule(Enum):
    LEX = "lex"
    RAND_CAND = "rand-cand"
    RAND_VOTER = "rand-voter"


class TrivialPolicy(Enum):
    """What happens when every voter abstains.

    ``FULL_TIE``: the winning set is the whole candidate set.
    ``INVALID``: the election is void and every voter gets utility -inf.
    """

    FULL_TIE = "full-tie"
    INVALID = "invalid"


def derive_preference(u: Sequence[int]) -> Tuple[int, ...]:
    """Candidates ordered from most to least preferred."""
    _check_utilities(u, len(u))
    return tuple(sorted(range(len(u)), key=lambda c: -u[c]))


def utilities_from_ranking(ranking: Sequence[int]) -> Tuple[int, ...]:
    """Rank-derived utilities: the candidate in position r (1-based) gets m - r + 1."""
    m = len(ranking)
    if sorted(ranking) != list(range(m)):
        raise InvalidProfileError(f"ranking {list(ranking)} is not a permutation of 0..{m - 1}")
    u = [0] * m
    for pos, c in enumerate(ranking):
        u[c] = m - pos
    return tuple(u)


def _check_utilities(u: Sequence[int], m: int) -> None:
    if len(u) != m:
        raise InvalidProfileError(f"utility vector {list(u)} has length {len(u)}, expected {m}")
    for x in u:
        if isinstance(x, bool) or not isinstance(x, int) or x <= 0:
            raise InvalidProfileError(f"utility vector {list(u)} must hold positive integers")
    if len(set(u)) != len(u):
        raise InvalidProfileError(f"utility vector {list(u)} has duplicate values")


@dataclass(frozen=True)
class Election:
    """n strategic voters with integer utilities over m candidates."""

    utilities: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        utils = tuple(tuple(u) for u in self.utilities)
        object.__setattr__(self, "utilities", utils)
        if not utils:
            raise InvalidProfileError("an election needs at least one voter")
        m = len(utils[0])
        if m < 1:
            raise InvalidProfileError("an election needs at least one candidate")
        for u in utils:
            _check_utilities(u, m)

    @classmethod
    def from_rankings(cls, rankings: Sequence[Sequence[int]]) -> "Election":
        return cls(tuple(utilities_from_ranking(r) for r in rankings))

    @property
    def n(self) -> int:
        return len(self.utilities)

    @property
    def m(self) -> int:
        return len(self.utilities[0])

    @property
    def preferences(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(derive_preference(u) for u in self.utilities)

    @property
    def tops(self) -> Tuple[int, ...]:
        return tuple(max(range(self.m), key=u.__getitem__) for u in self.utilities)

    def truthful(self) -> BallotVector:
        return self.tops

    def trivial(self) -> BallotVector:
        return (ABSTAIN,) * self.n

    def prefers(self, i: int, c: int, d: int) -> bool:
        """True iff voter i strictly prefers c to d."""
        return self.utilities[i][c] > self.utilities[i][d]

    def favorite_in(self, i: int, cands) -> int:
        u = self.utilities[i]
        return max(cands, key=u.__getitem__)


@dataclass(frozen=True)
class PrincipledProfile:
    """Non-strategic voters who always vote their top choice.

    Each entry of ``rankings`` is a full ranking (best first); the ranking is
    needed by the random-voter rule to pick a member of the winning set.
    """

    rankings: Tuple[Tuple[int, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rankings", tuple(tuple(r) for r in self.rankings))

    @property
    def s(self) -> int:
        return len(self.rankings)

    @property
    def tops(self) -> Tuple[int, ...]:
        return tuple(r[0] for r in self.rankings)

    def validate(self, m: int) -> None:
        for r in self.rankings:
            if sorted(r) != list(range(m)):
                raise InvalidProfileError(f"principled ranking {list(r)} is not a permutation of 0..{m - 1}")

    def favorite_in(self, t: int, cands) -> int:
        for c in self.rankings[t]:
            if c in cands:
                return c
        raise ValueError("empty candidate set")


EMPTY_PRINCIPLED = PrincipledProfile()


@dataclass(frozen=True)
class ScoreBoard:
    scores: Tuple[int, ...]
    M: int
    W: Tuple[int, ...]
    H: Tuple[int, ...]
    Hprime: Tuple[int, ...]

    @property
    def lex_winner(self) -> int:
        return self.W[0]


def tally(m: int, ballots: Sequence[Ballot]) -> ScoreBoard:
    """Scores of any sequence of ballots over m candidates."""
    sc = [0] * m
    for b in ballots:
        if b is not ABSTAIN:
            sc[b] += 1
    M = max(sc)
    if M == 0:
        W = tuple(range(m))
    else:
        W = tuple(c for c in range(m) if sc[c] == M)
    H = tuple(c for c in range(m) if sc[c] == M - 1)
    Hp = tuple(c for c in range(m) if sc[c] == M - 2)
    return ScoreBoard(tuple(sc), M, W, H, Hp)


def check_ballots(e: Election, b: Sequence[Ballot]) -> None:
    if len(b) != e.n:
        raise InvalidProfileError(f"ballot vector has {len(b)} entries for {e.n} voters")
    for x in b:
        if x is not ABSTAIN and not (isinstance(x, int) and 0 <= x < e.m):
            raise InvalidProfileError(f"invalid ballot {x!r}")


def scores(e: Election, b: Sequence[Ballot]) -> ScoreBoard:
    check_ballots(e, b)
    return tally(e.m, b)


@dataclass(frozen=True)
class Lottery:
    """Exact probability distribution over candidates."""

    probs: Tuple[Fraction, ...]

    def __post_init__(self):
        probs = tuple(Fraction(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if any(p < 0 for p in probs) or sum(probs) != 1:
            raise ValueError(f"not a probability vector: {probs}")

    @classmethod
    def degenerate(cls, m: int, c: int) -> "Lottery":
        return cls(tuple(Fraction(int(j == c)) for j in range(m)))

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(c for c, p in enumerate(self.probs) if p)

    def __getitem__(self, c: int) -> Fraction:
        return self.probs[c]

    def __len__(self) -> int:
        return len(self.probs)


def selection_counts(e: Election, b: Sequence[Ballot], W, principled: PrincipledProfile = EMPTY_PRINCIPLED):
    """Per-candidate number of voters who pick it under the random-voter rule.

    A voter picks her own ballot if it is in W, otherwise her favorite member
    of W.  Abstainers pick too; principled voters pick by their ranking.
    """
    Wset = set(W)
    cnt = [0] * e.m
    for i, x in enumerate(b):
        cnt[x if x in Wset else e.favorite_in(i, W)] += 1
    for t, top in enumerate(principled.tops):
        cnt[top if top in Wset else principled.favorite_in(t, Wset)] += 1
    return cnt


def lottery(e: Election, b: Sequence[Ballot], rule: TieRule,
            principled: PrincipledProfile = EMPTY_PRINCIPLED,
            policy: TrivialPolicy = TrivialPolicy.FULL_TIE) -> Optional[Lottery]:
    """Winning lottery for ballots b plus the principled block.

    Returns None when the trivial ballot is declared invalid.
    """
    check_ballots(e, b)
    board = tally(e.m, tuple(b) + principled.tops)
    if board.M == 0 and policy is TrivialPolicy.INVALID:
        return None
    m, W = e.m, board.W
    if rule is TieRule.LEX:
        return Lottery.degenerate(m, W[0])
    if rule is TieRule.RAND_CAND:
        p = Fraction(1, len(W))
        return Lottery(tuple(p if c in W else Fraction(0) for c in range(m)))
    cnt = selection_counts(e, b, W, principled)
    total = e.n + principled.s
    return Lottery(tuple(Fraction(x, total) for x in cnt))


def expected_utility(u: Sequence[int], p: Lottery) -> Fraction:
    if len(u) != len(p):
        raise ValueError("dimension mismatch")
    return sum((x * q for x, q in zip(u, p.probs)), Fraction(0))


def candidate_name(c: int) -> str:
    return f"c{c + 1}"


def format_ballots(b: Sequence[Ballot], names: Optional[Sequence[str]] = None) -> str:
    def one(x):
        if x is ABSTAIN:
            return "-"
        return names[x] if names else candidate_name(x)

    return "(" + ",".join(one(x) for x in b) + ")"
