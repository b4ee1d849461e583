"""JSON documents for elections and MSI/BCBS instances.

An election document looks like::

    {
      "candidates": ["x", "y", "z"],
      "voters": [
        ["x", "y", "z"],
        [9, 5, 1]
      ],
      "principled": [["z", "x", "y"]]
    }

Candidate order is the lexicographic tie-break priority.  A voter is either a
ranking (candidate names, best first) or a list of distinct positive integer
utilities in candidate order.  ``principled`` is optional.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .election import Election, InvalidProfileError, PrincipledProfile, utilities_from_ranking
from .hardness import BcbsInstance, MsiInstance

VoterEntry = Tuple[Union[int, str], ...]


class DocumentError(ValueError):
    """Malformed document; the message names the offending location."""


@dataclass(frozen=True)
class ElectionDocument:
    candidates: Tuple[str, ...]
    voters: Tuple[VoterEntry, ...]
    principled: Tuple[Tuple[str, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "voters", tuple(tuple(v) for v in self.voters))
        object.__setattr__(self, "principled", tuple(tuple(r) for r in self.principled))
        self._validate()

    def _validate(self):
        names = self.candidates
        if not names:
            raise DocumentError("candidates: at least one candidate is required")
        for pos, name in enumerate(names):
            if not isinstance(name, str) or not name:
                raise DocumentError(f"candidates[{pos}]: names must be non-empty strings")
        if len(set(names)) != len(names):
            raise DocumentError("candidates: names must be unique")
        if not self.voters:
            raise DocumentError("voters: at least one voter is required")
        for pos, v in enumerate(self.voters):
            self._voter_utilities(v, f"voters[{pos}]")
        for pos, r in enumerate(self.principled):
            self._ranking(r, f"principled[{pos}]")

    def index(self, name: str) -> int:
        try:
            return self.candidates.index(name)
        except ValueError:
            raise DocumentError(f"unknown candidate {name!r}") from None

    def _ranking(self, r: Sequence[Any], where: str) -> Tuple[int, ...]:
        if not all(isinstance(x, str) for x in r):
            raise DocumentError(f"{where}: a ranking lists candidate names")
        if sorted(r) != sorted(self.candidates):
            raise DocumentError(f"{where}: ranking must list every candidate exactly once")
        return tuple(self.candidates.index(x) for x in r)

    def _voter_utilities(self, v: Sequence[Any], where: str) -> Tuple[int, ...]:
        if v and all(isinstance(x, str) for x in v):
            return utilities_from_ranking(self._ranking(v, where))
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
            raise DocumentError(f"{where}: expected a ranking of names or a list of integer utilities")
        if len(v) != len(self.candidates):
            raise DocumentError(f"{where}: {len(v)} utilities for {len(self.candidates)} candidates")
        if any(x <= 0 for x in v) or len(set(v)) != len(v):
            raise DocumentError(f"{where}: utilities must be distinct positive integers")
        return tuple(v)

    def election(self) -> Election:
        return Election(tuple(self._voter_utilities(v, f"voters[{i}]") for i, v in enumerate(self.voters)))

    def principled_profile(self) -> PrincipledProfile:
        return PrincipledProfile(tuple(self._ranking(r, f"principled[{i}]") for i, r in enumerate(self.principled)))

    @classmethod
    def from_election(cls, e: Election, names: Optional[Sequence[str]] = None,
                      principled: PrincipledProfile = PrincipledProfile()) -> "ElectionDocument":
        names = tuple(names) if names else tuple(f"c{j + 1}" for j in range(e.m))
        prin = tuple(tuple(names[c] for c in r) for r in principled.rankings)
        return cls(names, e.utilities, prin)


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        line = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
        raise DocumentError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}\n    {line}") from None


def _require(obj: Any, key: str, kind, where: str = "document"):
    if not isinstance(obj, dict):
        raise DocumentError(f"{where}: expected a JSON object")
    if key not in obj:
        raise DocumentError(f"{where}: missing field {key!r}")
    val = obj[key]
    if not isinstance(val, kind):
        raise DocumentError(f"{key}: wrong type")
    return val


def parse_document(text: str) -> ElectionDocument:
    obj = _load_json(text)
    cands = _require(obj, "candidates", list)
    voters = _require(obj, "voters", list)
    unknown = set(obj) - {"candidates", "voters", "principled"}
    if unknown:
        raise DocumentError(f"document: unknown fields {sorted(unknown)}")
    for pos, v in enumerate(voters):
        if not isinstance(v, list):
            raise DocumentError(f"voters[{pos}]: expected a list")
    prin = obj.get("principled") or []
    if not isinstance(prin, list) or not all(isinstance(r, list) for r in prin):
        raise DocumentError("principled: expected a list of rankings")
    try:
        return ElectionDocument(tuple(cands), tuple(tuple(v) for v in voters), tuple(tuple(r) for r in prin))
    except InvalidProfileError as exc:
        raise DocumentError(str(exc)) from None


def _rows(key: str, rows: Sequence[Sequence[Any]]) -> List[str]:
    body = ",\n".join("    " + json.dumps(list(r)) for r in rows)
    return [f'  "{key}": [\n{body}\n  ]']


def serialize_document(doc: ElectionDocument) -> str:
    parts = [f'  "candidates": {json.dumps(list(doc.candidates))}']
    parts += _rows("voters", doc.voters)
    if doc.principled:
        parts += _rows("principled", doc.principled)
    return "{\n" + ",\n".join(parts) + "\n}\n"


@dataclass(frozen=True)
class MsiDocument:
    """Elements are named; sets list element names; k and q as in MSI."""

    elements: Tuple[str, ...]
    sets: Tuple[Tuple[str, ...], ...]
    k: int
    q: int

    def instance(self) -> MsiInstance:
        idx = {name: j for j, name in enumerate(self.elements)}
        try:
            sets = tuple(frozenset(idx[x] for x in s) for s in self.sets)
        except KeyError as exc:
            raise DocumentError(f"sets: unknown element {exc.args[0]!r}") from None
        try:
            return MsiInstance(len(self.elements), sets, self.k, self.q)
        except ValueError as exc:
            raise DocumentError(str(exc)) from None

    @classmethod
    def from_instance(cls, inst: MsiInstance) -> "MsiDocument":
        names = tuple(f"e{j + 1}" for j in range(inst.n))
        return cls(names, tuple(tuple(names[x] for x in sorted(s)) for s in inst.sets), inst.k, inst.q)


def parse_msi(text: str) -> MsiDocument:
    obj = _load_json(text)
    elements = _require(obj, "elements", list)
    sets = _require(obj, "sets", list)
    k = _require(obj, "k", int)
    q = _require(obj, "q", int)
    doc = MsiDocument(tuple(elements), tuple(tuple(s) for s in sets), k, q)
    doc.instance()
    return doc


def serialize_msi(doc: MsiDocument) -> str:
    parts = [f'  "elements": {json.dumps(list(doc.elements))}']
    parts += _rows("sets", doc.sets)
    parts += [f'  "k": {doc.k}', f'  "q": {doc.q}']
    return "{\n" + ",\n".join(parts) + "\n}\n"


@dataclass(frozen=True)
class BcbsDocument:
    left: Tuple[str, ...]
    right: Tuple[str, ...]
    edges: Tuple[Tuple[str, str], ...]
    k: int

    def instance(self) -> BcbsInstance:
        li = {x: j for j, x in enumerate(self.left)}
        ri = {x: j for j, x in enumerate(self.right)}
        try:
            edges = frozenset((li[a], ri[b]) for a, b in self.edges)
        except (KeyError, ValueError) as exc:
            raise DocumentError(f"edges: bad edge ({exc})") from None
        try:
            return BcbsInstance(len(self.left), len(self.right), edges, self.k)
        except ValueError as exc:
            raise DocumentError(str(exc)) from None


def parse_bcbs(text: str) -> BcbsDocument:
    obj = _load_json(text)
    left = _require(obj, "left", list)
    right = _require(obj, "right", list)
    edges = _require(obj, "edges", list)
    k = _require(obj, "k", int)
    doc = BcbsDocument(tuple(left), tuple(right), tuple(tuple(e) for e in edges), k)
    doc.instance()
    return doc
