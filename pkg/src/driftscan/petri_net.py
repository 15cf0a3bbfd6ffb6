"""Workflow-shaped Petri nets: firing rule, replay, one-length paths, PNML."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from xml.etree import ElementTree as ET

from .event_log import Trace
from .exceptions import (
    NetStructureError,
    ReplayBudgetExceeded,
    TransitionNotEnabled,
)

__all__ = [
    "Transition",
    "Marking",
    "PetriNet",
    "enabled",
    "fire",
    "is_replayable",
    "extract_olp",
    "to_pnml",
    "from_pnml",
    "DEFAULT_REPLAY_BUDGET",
]

DEFAULT_REPLAY_BUDGET = 10_000
SILENT_NAME = "tau"


@dataclass(frozen=True)
class Transition:
    id: str
    label: str | None = None

    @property
    def silent(self) -> bool:
        return self.label is None


class Marking(Mapping):
    """Immutable multiset of tokens over places. Zero counts are not stored."""

    __slots__ = ("_counts", "_hash")

    def __init__(self, counts: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = counts.items() if isinstance(counts, Mapping) else counts
        clean = {}
        for place, k in items:
            if k < 0:
                raise ValueError(f"negative token count on {place!r}")
            if k:
                clean[place] = clean.get(place, 0) + k
        self._counts = clean
        self._hash = None

    def __getitem__(self, place):
        return self._counts.get(place, 0)

    def __iter__(self):
        return iter(self._counts)

    def __len__(self):
        return len(self._counts)

    def __contains__(self, place):
        return place in self._counts

    def __eq__(self, other):
        if isinstance(other, Marking):
            return self._counts == other._counts
        if isinstance(other, Mapping):
            return self._counts == {p: k for p, k in other.items() if k}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._counts.items()))
        return self._hash

    def total(self) -> int:
        return sum(self._counts.values())

    def __repr__(self):
        inner = ", ".join(f"{p}: {k}" for p, k in sorted(self._counts.items()))
        return f"Marking({{{inner}}})"


class PetriNet:
    """A place/transition net with a unique source and sink place.

    ``transitions`` is an iterable of :class:`Transition` or a mapping from
    transition id to label (``None`` for silent). ``arcs`` are ``(src, dst)``
    id pairs. Source and sink are inferred when not given.
    """

    def __init__(self, places, transitions, arcs, source=None, sink=None):
        self.places = tuple(places)
        if isinstance(transitions, Mapping):
            transitions = [Transition(t, lbl) for t, lbl in transitions.items()]
        self.transitions = {t.id: t for t in transitions}
        self.arcs = frozenset((str(a), str(b)) for a, b in arcs)

        place_set = set(self.places)
        if len(place_set) != len(self.places):
            raise NetStructureError("duplicate place ids")
        if place_set & self.transitions.keys():
            raise NetStructureError(
                f"ids used as both place and transition: {sorted(place_set & self.transitions.keys())}"
            )
        self._pre = {n: [] for n in (*self.places, *self.transitions)}
        self._post = {n: [] for n in (*self.places, *self.transitions)}
        for a, b in sorted(self.arcs):
            if (a in place_set) == (b in place_set) or a not in self._pre or b not in self._pre:
                raise NetStructureError(f"arc {a}->{b} must join a place and a transition")
            self._post[a].append(b)
            self._pre[b].append(a)

        if source is None:
            source = self._unique(p for p in self.places if not self._pre[p])
        if sink is None:
            sink = self._unique([p for p in self.places if not self._post[p]], "sink")
        if source not in place_set or sink not in place_set:
            raise NetStructureError("source and sink must be places")
        if self._pre[source]:
            raise NetStructureError(f"source place {source!r} has input arcs")
        if self._post[sink]:
            raise NetStructureError(f"sink place {sink!r} has output arcs")
        self.source, self.sink = source, sink
        self._check_connected()
        self._compile()
        self._replay_cache: dict[tuple[str, ...], tuple[bool, int]] = {}
        self._olp = None

    @staticmethod
    def _unique(candidates, what="source"):
        found = list(candidates)
        if len(found) != 1:
            raise NetStructureError(f"expected exactly one {what} place, found {sorted(found)}")
        return found[0]

    def _check_connected(self):
        def reach(start, step):
            seen, todo = {start}, [start]
            while todo:
                for nxt in step[todo.pop()]:
                    if nxt not in seen:
                        seen.add(nxt)
                        todo.append(nxt)
            return seen

        fwd, bwd = reach(self.source, self._post), reach(self.sink, self._pre)
        stray = [n for n in self._pre if n not in fwd or n not in bwd]
        if stray:
            raise NetStructureError(f"nodes not on a source-sink path: {sorted(stray)}")

    def _compile(self):
        self._pidx = {p: k for k, p in enumerate(self.places)}
        self._tids = sorted(self.transitions)
        self._tpre = {t: tuple(self._pidx[p] for p in self._pre[t]) for t in self._tids}
        self._tpost = {t: tuple(self._pidx[p] for p in self._post[t]) for t in self._tids}
        self._by_label: dict[str, list[str]] = {}
        self._silent = []
        for t in self._tids:
            lbl = self.transitions[t].label
            if lbl is None:
                self._silent.append(t)
            else:
                self._by_label.setdefault(lbl, []).append(t)
        m0 = [0] * len(self.places)
        m0[self._pidx[self.source]] = 1
        self._m0 = tuple(m0)
        mf = [0] * len(self.places)
        mf[self._pidx[self.sink]] = 1
        self._mf = tuple(mf)

    # -- structure -----------------------------------------------------------

    def preset(self, node) -> tuple[str, ...]:
        return tuple(self._pre[node])

    def postset(self, node) -> tuple[str, ...]:
        return tuple(self._post[node])

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(self._by_label)

    @property
    def initial_marking(self) -> Marking:
        return Marking({self.source: 1})

    @property
    def final_marking(self) -> Marking:
        return Marking({self.sink: 1})

    def __eq__(self, other):
        if not isinstance(other, PetriNet):
            return NotImplemented
        return (
            set(self.places) == set(other.places)
            and self.transitions == other.transitions
            and self.arcs == other.arcs
            and (self.source, self.sink) == (other.source, other.sink)
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"PetriNet(<{len(self.places)} places, {len(self.transitions)} transitions, "
            f"{len(self.arcs)} arcs>)"
        )

    # -- marking conversion --------------------------------------------------

    def _to_vec(self, m: Mapping[str, int]) -> tuple[int, ...]:
        v = [0] * len(self.places)
        for p, k in m.items():
            if p not in self._pidx:
                raise KeyError(f"unknown place {p!r}")
            v[self._pidx[p]] = k
        return tuple(v)

    def _to_marking(self, v) -> Marking:
        return Marking((self.places[i], k) for i, k in enumerate(v) if k)

    # -- firing on vectors ---------------------------------------------------

    def _enabled_vec(self, v, t):
        return all(v[p] >= 1 for p in self._tpre[t])

    def _fire_vec(self, v, t):
        out = list(v)
        for p in self._tpre[t]:
            out[p] -= 1
        for p in self._tpost[t]:
            out[p] += 1
        return tuple(out)

    def _silent_closure(self, states: set, budget_state: list) -> set:
        todo = list(states)
        while todo:
            v = todo.pop()
            for t in self._silent:
                if self._enabled_vec(v, t):
                    w = self._fire_vec(v, t)
                    if w not in states:
                        states.add(w)
                        todo.append(w)
                        budget_state[0] += 1
                        if budget_state[0] > budget_state[1]:
                            raise ReplayBudgetExceeded(
                                f"replay explored more than {budget_state[1]} markings"
                            )
        return states

    def _replay(self, acts: tuple[str, ...], budget: int) -> tuple[bool, int]:
        state = [1, budget]
        frontier = self._silent_closure({self._m0}, state)
        for a in acts:
            candidates = self._by_label.get(a)
            if not candidates:
                return False, state[0]
            nxt = set()
            for v in frontier:
                for t in candidates:
                    if self._enabled_vec(v, t):
                        nxt.add(self._fire_vec(v, t))
            if not nxt:
                return False, state[0]
            state[0] += len(nxt)
            if state[0] > budget:
                raise ReplayBudgetExceeded(f"replay explored more than {budget} markings")
            frontier = self._silent_closure(nxt, state)
        return self._mf in frontier, state[0]


def enabled(net: PetriNet, m: Mapping[str, int]) -> frozenset[str]:
    """Ids of transitions whose input places all hold a token under ``m``."""
    v = net._to_vec(m)
    return frozenset(t for t in net._tids if net._enabled_vec(v, t))


def fire(net: PetriNet, m: Mapping[str, int], t: str) -> Marking:
    if t not in net.transitions:
        raise KeyError(f"unknown transition {t!r}")
    v = net._to_vec(m)
    if not net._enabled_vec(v, t):
        raise TransitionNotEnabled(f"transition {t!r} is not enabled in {Marking(m)!r}")
    return net._to_marking(net._fire_vec(v, t))


def is_replayable(
    net: PetriNet, trace: Trace | Sequence[str], budget: int = DEFAULT_REPLAY_BUDGET
) -> bool:
    """Whether some firing sequence from the initial marking produces exactly the
    trace's labels (silent transitions interleaved freely) and ends with one
    token in the sink and nothing else.

    Raises :class:`ReplayBudgetExceeded` when more than ``budget`` distinct
    markings would have to be explored.
    """
    acts = trace.activities if isinstance(trace, Trace) else tuple(trace)
    cached = net._replay_cache.get(acts)
    if cached is not None and cached[1] <= budget:
        return cached[0]
    result = net._replay(acts, budget)
    net._replay_cache[acts] = result
    return result[0]


def extract_olp(net: PetriNet) -> frozenset[tuple[str, str]]:
    """Label pairs (a, b) such that b's transition is reachable from a's through
    places and silent transitions only."""
    if net._olp is not None:
        return net._olp
    pairs = set()
    for t in net._tids:
        a = net.transitions[t].label
        if a is None:
            continue
        seen = set()
        todo = list(net._post[t])
        while todo:
            node = todo.pop()
            if node in seen:
                continue
            seen.add(node)
            if node in net.transitions:
                b = net.transitions[node].label
                if b is not None:
                    pairs.add((a, b))
                    continue
            todo.extend(net._post[node])
    net._olp = frozenset(pairs)
    return net._olp


# ---------------------------------------------------------------------------
# PNML subset

def to_pnml(net: PetriNet) -> bytes:
    root = ET.Element("pnml")
    net_el = ET.SubElement(
        root, "net", {"id": "net", "type": "http://www.pnml.org/version-2009/grammar/ptnet"}
    )
    page = ET.SubElement(net_el, "page", {"id": "page"})
    for p in net.places:
        p_el = ET.SubElement(page, "place", {"id": p})
        if p == net.source:
            im = ET.SubElement(p_el, "initialMarking")
            ET.SubElement(im, "text").text = "1"
    for tid in sorted(net.transitions):
        t_el = ET.SubElement(page, "transition", {"id": tid})
        name = ET.SubElement(t_el, "name")
        ET.SubElement(name, "text").text = net.transitions[tid].label or SILENT_NAME
    for k, (a, b) in enumerate(sorted(net.arcs)):
        ET.SubElement(page, "arc", {"id": f"arc{k}", "source": a, "target": b})
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"


def from_pnml(data: bytes | str) -> PetriNet:
    if isinstance(data, str):
        data = data.encode("utf-8")
    root = ET.fromstring(data)
    places, transitions, arcs = [], [], []
    source = None
    for el in root.iter():
        tag = el.tag.rsplit("}", 1)[-1]
        if tag == "place":
            places.append(el.get("id"))
            text = el.find("./initialMarking/text")
            if text is not None and (text.text or "").strip() not in ("", "0"):
                source = el.get("id")
        elif tag == "transition":
            text = el.find("./name/text")
            label = (text.text or "").strip() if text is not None else ""
            transitions.append(
                Transition(el.get("id"), None if label in ("", SILENT_NAME) else label)
            )
        elif tag == "arc":
            arcs.append((el.get("source"), el.get("target")))
    return PetriNet(places, transitions, arcs, source=source)
