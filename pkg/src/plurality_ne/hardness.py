"""Reduction chain BCBS -> MSI -> truth-biased SingleNE with lexicographic ties.

MSI (maximum k-subset intersection): given sets A_1..A_m over n elements,
do k of them share at least q elements?  BCBS (balanced complete bipartite
subgraph): does a bipartite graph contain K_{k,k}?
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import comb
from typing import FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .election import BallotVector, Election, TieRule, tally
from .game import BudgetExceeded, GameSpec, Setting, is_pne

DEFAULT_MSI_BUDGET = 10 ** 6


@dataclass(frozen=True)
class MsiInstance:
    n: int
    sets: Tuple[FrozenSet[int], ...]
    k: int
    q: int

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in self.sets))
        if self.n < 0 or self.k < 1 or self.q < 0:
            raise ValueError("need n >= 0, k >= 1, q >= 0")
        if self.k > len(self.sets):
            raise ValueError(f"k={self.k} exceeds the number of sets {len(self.sets)}")
        if self.q > self.n:
            raise ValueError(f"q={self.q} exceeds the number of elements {self.n}")
        for s in self.sets:
            if any(not 0 <= x < self.n for x in s):
                raise ValueError(f"set {sorted(s)} has elements outside 0..{self.n - 1}")

    @property
    def m(self) -> int:
        return len(self.sets)


@dataclass(frozen=True)
class MsiResult:
    answer: bool
    certificate: Optional[Tuple[int, ...]]


def msi_brute(inst: MsiInstance, budget: int = DEFAULT_MSI_BUDGET) -> MsiResult:
    required = comb(inst.m, inst.k)
    if required > budget:
        raise BudgetExceeded(required, budget, "k-subsets")
    for combo in itertools.combinations(range(inst.m), inst.k):
        common = frozenset.intersection(*(inst.sets[i] for i in combo))
        if len(common) >= inst.q:
            return MsiResult(True, combo)
    return MsiResult(False, None)


def check_certificate(inst: MsiInstance, cert: Sequence[int]) -> FrozenSet[int]:
    """The intersection of a valid certificate; raises ValueError otherwise."""
    cert = tuple(cert)
    if len(cert) != inst.k or len(set(cert)) != inst.k or any(not 0 <= i < inst.m for i in cert):
        raise ValueError(f"certificate {cert} is not a set of {inst.k} set indices")
    common = frozenset.intersection(*(inst.sets[i] for i in cert))
    if len(common) < inst.q:
        raise ValueError(f"certificate {cert} intersects in {len(common)} < q={inst.q} elements")
    return common


@dataclass(frozen=True)
class BcbsInstance:
    left: int
    right: int
    edges: FrozenSet[Tuple[int, int]]
    k: int

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))
        if self.k < 1 or self.k > min(self.left, self.right):
            raise ValueError("need 1 <= k <= min(|left|, |right|)")
        for l, r in self.edges:
            if not (0 <= l < self.left and 0 <= r < self.right):
                raise ValueError(f"edge {(l, r)} out of range")

    def neighborhood(self, r: int) -> FrozenSet[int]:
        return frozenset(l for l, rr in self.edges if rr == r)


def bcbs_brute(g: BcbsInstance) -> bool:
    """Direct K_{k,k} search over right-vertex subsets and common neighborhoods."""
    masks = [0] * g.right
    for l, r in g.edges:
        masks[r] |= 1 << l
    for R in itertools.combinations(range(g.right), g.k):
        common = (1 << g.left) - 1
        for r in R:
            common &= masks[r]
        if bin(common).count("1") >= g.k:
            return True
    return False


def bcbs_to_msi(g: BcbsInstance) -> MsiInstance:
    return MsiInstance(g.left, tuple(g.neighborhood(r) for r in range(g.right)), g.k, g.k)


def all_bipartite_graphs(max_left: int = 4, max_right: int = 4, max_k: int = 2) -> Iterator[BcbsInstance]:
    for left in range(1, max_left + 1):
        for right in range(1, max_right + 1):
            pairs = [(l, r) for l in range(left) for r in range(right)]
            for mask in range(1 << len(pairs)):
                edges = frozenset(p for bit, p in enumerate(pairs) if mask >> bit & 1)
                for k in range(1, min(max_k, left, right) + 1):
                    yield BcbsInstance(left, right, edges, k)


def pad_msi(inst: MsiInstance) -> MsiInstance:
    """Append empty sets until m > n + k + q and every element misses some set.

    An empty set never helps a k-subset reach q >= 1 common elements, and with
    q = 0 every instance is a yes-instance, so the answer is unchanged.
    """
    sets = list(inst.sets)
    while len(sets) <= inst.n + inst.k + inst.q or any(all(x in s for s in sets) for x in range(inst.n)):
        sets.append(frozenset())
    return MsiInstance(inst.n, tuple(sets), inst.k, inst.q)


@dataclass(frozen=True)
class ReducedElection:
    """Election built from a padded MSI instance.

    Candidates 0..n-1 are the elements, then w3, w1, w2 (so ties favor the
    elements, then w3, then w1).  ``blocks[v]`` is voter v's block (1..5).
    """

    election: Election
    msi: MsiInstance
    blocks: Tuple[int, ...]
    s: int
    scale: int

    @property
    def w3(self) -> int:
        return self.msi.n

    @property
    def w1(self) -> int:
        return self.msi.n + 1

    @property
    def w2(self) -> int:
        return self.msi.n + 2

    @property
    def target(self) -> int:
        return self.w2

    @property
    def deviators_needed(self) -> int:
        i = self.msi
        return i.k + i.n - i.q + 1

    def voters_in(self, block: int) -> List[int]:
        return [v for v, b in enumerate(self.blocks) if b == block]

    def block4_supporters(self, element: int) -> List[int]:
        tops = self.election.tops
        return [v for v in self.voters_in(4) if tops[v] == element]

    def candidate_names(self) -> Tuple[str, ...]:
        return tuple(f"e{j + 1}" for j in range(self.msi.n)) + ("w3", "w1", "w2")


def _ranked_utilities(ranking: Sequence[int], top: int, step: int) -> Tuple[int, ...]:
    u = [0] * len(ranking)
    for pos, c in enumerate(ranking):
        u[c] = top - step * pos
    return tuple(u)


def msi_to_election(inst: MsiInstance) -> ReducedElection:
    """Build the SingleNE instance (target w2) for a possibly unpadded MSI instance.

    Utilities are rationals with delta = 1/(6(n+m)), multiplied
    by 12(n+m) so that delta becomes 2.
    """
    inst = pad_msi(inst)
    n, m, k, q = inst.n, inst.m, inst.k, inst.q
    s = m - k + 3
    block3 = s - k - (n - q) - 1
    if block3 < 0:
        raise ValueError(f"block 3 would have negative size {block3}")
    w3, w1, w2 = n, n + 1, n + 2
    scale = 12 * (n + m)
    E = list(range(n))
    utils, blocks = [], []
    for A in inst.sets:
        u = [0] * (n + 3)
        u[w3], u[w2], u[w1] = scale, scale // 2, scale // 4
        for j, e in enumerate([x for x in E if x not in A], start=1):
            u[e] = scale - 2 * j
        for j, e in enumerate(sorted(A), start=1):
            u[e] = scale // 2 - 2 * j
        utils.append(tuple(u))
        blocks.append(1)
    for _ in range(s - 1):
        utils.append(_ranked_utilities([w1, w2, w3] + E, scale, 2))
        blocks.append(2)
    for _ in range(block3):
        utils.append(_ranked_utilities([w2, w1, w3] + E, scale, 2))
        blocks.append(3)
    for e in E:
        for _ in range(s - 2):
            rest = [x for x in E if x != e]
            utils.append(_ranked_utilities([e, w3, w2, w1] + rest, scale, 2))
            blocks.append(4)
    utils.append(_ranked_utilities([w3, w2] + E + [w1], scale, 2))
    blocks.append(5)
    return ReducedElection(Election(tuple(utils)), inst, tuple(blocks), s, scale)


def certificate_to_ballots(r: ReducedElection, cert: Sequence[int]) -> BallotVector:
    """Truthful ballots except k + (n - q) + 1 voters who switch to w2.

    The switchers are the Block-1 voters of the certificate sets, the Block-5
    voter, and one Block-4 supporter of every element outside E'', where E''
    is the first q elements of the certificate's intersection.
    """
    inst = r.msi
    common = sorted(check_certificate(inst, cert))
    keep = set(common[:inst.q])
    block1 = r.voters_in(1)
    movers = [block1[i] for i in cert] + r.voters_in(5)
    for e in range(inst.n):
        if e not in keep:
            movers.append(r.block4_supporters(e)[0])
    b = list(r.election.tops)
    for v in movers:
        b[v] = r.w2
    assert len(movers) == r.deviators_needed
    return tuple(b)


def _compositions(total: int, parts: int, cap: int) -> Iterator[Tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for x in range(min(total, cap) + 1):
        for rest in _compositions(total - x, parts - 1, cap):
            yield (x,) + rest


def _specialized_space(r: ReducedElection) -> int:
    inst = r.msi
    need = r.deviators_needed
    count = 0
    for b5 in (0, 1):
        for r1 in range(0, min(inst.m, need - b5) + 1):
            rest = need - b5 - r1
            count += comb(inst.m, r1) * sum(1 for _ in _compositions(rest, inst.n, r.s - 2))
    return count


def single_ne_candidates(r: ReducedElection) -> Iterator[BallotVector]:
    """Vectors with Blocks 2-3 truthful and exactly k + n - q + 1 switches to w2.

    Block-4 voters backing the same element are identical, so only how many
    of them switch matters; the first ones in voter order are used.
    """
    inst = r.msi
    need = r.deviators_needed
    a = r.election.tops
    block1 = r.voters_in(1)
    block5 = r.voters_in(5)
    support = [r.block4_supporters(e) for e in range(inst.n)]
    for b5 in (0, 1):
        for r1 in range(0, min(inst.m, need - b5) + 1):
            for D1 in itertools.combinations(block1, r1):
                for counts in _compositions(need - b5 - r1, inst.n, r.s - 2):
                    b = list(a)
                    for v in D1:
                        b[v] = r.w2
                    if b5:
                        b[block5[0]] = r.w2
                    for e, c in enumerate(counts):
                        for v in support[e][:c]:
                            b[v] = r.w2
                    yield tuple(b)


def single_ne_specialized(r: ReducedElection, budget: int = DEFAULT_MSI_BUDGET) -> Optional[BallotVector]:
    """A PNE electing w2 alone from the restricted search, or None."""
    required = _specialized_space(r)
    if required > budget:
        raise BudgetExceeded(required, budget)
    g = GameSpec(r.election, Setting.TRUTH, TieRule.LEX)
    for b in single_ne_candidates(r):
        if tally(r.election.m, b).W != (r.w2,):
            continue
        if is_pne(g, b):
            return b
    return None


def harness_instances(count: int = 24, seed: int = 0) -> List[MsiInstance]:
    """Tiny MSI instances (padded size <= 6 sets) with equal yes/no counts."""
    rng = random.Random(seed)
    shapes = [(1, 1, 1), (1, 2, 1), (1, 3, 1), (2, 1, 1), (2, 2, 1), (2, 1, 2), (3, 1, 1)]
    yes, no = [], []
    seen = set()
    while len(yes) < count // 2 or len(no) < count - count // 2:
        n, k, q = rng.choice(shapes)
        m0 = rng.randint(k, 6)
        sets = tuple(frozenset(x for x in range(n) if rng.random() < 0.5) for _ in range(m0))
        inst = MsiInstance(n, sets, k, q)
        if pad_msi(inst).m > 6:
            continue
        key = (n, tuple(tuple(sorted(s)) for s in sets), k, q)
        if key in seen:
            continue
        seen.add(key)
        bucket = yes if msi_brute(inst).answer else no
        if len(bucket) < (count // 2 if bucket is yes else count - count // 2):
            bucket.append(inst)
    return yes + no
