"""Synthetic drifting logs: play-out of process trees, change-pattern
transforms, and alternating splices with ground truth."""

from __future__ import annotations

import json
import os
import random
from collections.abc import Sequence
from dataclasses import dataclass

from .evaluation import GroundTruth, default_epsilon
from .event_log import Event, EventLog, Trace, serialize_log
from .exceptions import PatternError
from .process_tree import Operator, ProcessTree, format_tree, leaf, loop, parse_tree, par, seq, tau, xor

__all__ = [
    "LOAN_MODEL",
    "BUILTIN_MODELS",
    "PATTERNS",
    "DEFAULT_SELECTORS",
    "play_out",
    "apply_pattern",
    "splice",
    "parse_selector",
    "LabeledCorpusEntry",
    "generate_entry",
    "write_entry",
]

# loan application model: A, then B with optional (C, D) rework, then the
# concurrent (E, F) / G block, H, and a final choice between I-K and the
# J ... O branch with two nested choices
LOAN_MODEL = seq(
    "A",
    loop("B", seq("C", "D")),
    par(seq("E", "F"), "G"),
    "H",
    xor(
        seq("I", "K"),
        seq("J", "L", xor("M", "N"), "O", xor(seq("P", "R"), seq("Q", "S"))),
    ),
)

BUILTIN_MODELS = {"loan": LOAN_MODEL}

PATTERNS = ("re", "cb", "lp", "pl", "cf", "sw", "rp", "cp")

# fragment paths used when generating from the loan model without --selector
DEFAULT_SELECTORS = {
    "re": (4, 1, 1),  # L
    "cb": (3,),  # H
    "lp": (2, 1),  # G
    "pl": (2, 0, 0),  # E, F
    "cf": (2, 0, 0),  # E, F
    "sw": (2, 0, 0),  # E, F
    "rp": (4, 0, 1),  # K
    "cp": (3,),  # H
}

DEFAULT_LOOP_CONTINUE = 0.3
_BASE_TIMESTAMP = 1_577_836_800_000  # 2020-01-01T00:00:00Z
_EVENT_STEP_MS = 60_000


# ---------------------------------------------------------------------------
# play-out

def _sample(node: ProcessTree, rng: random.Random, p_loop: float) -> list[str]:
    if node.is_leaf:
        return [] if node.label is None else [node.label]
    op = node.operator
    if op is Operator.SEQUENCE:
        out = []
        for c in node.children:
            out.extend(_sample(c, rng, p_loop))
        return out
    if op is Operator.XOR:
        return _sample(rng.choice(node.children), rng, p_loop)
    if op is Operator.PARALLEL:
        parts = [_sample(c, rng, p_loop) for c in node.children]
        return _interleave(parts, rng)
    body, redo = node.children[0], node.children[1:]
    out = _sample(body, rng, p_loop)
    while rng.random() < p_loop:
        out.extend(_sample(rng.choice(redo), rng, p_loop))
        out.extend(_sample(body, rng, p_loop))
    return out


def _interleave(parts: list[list[str]], rng: random.Random) -> list[str]:
    # picking the next source with probability proportional to what it has left
    # makes every interleaving equally likely
    pos = [0] * len(parts)
    left = [len(p) for p in parts]
    total = sum(left)
    out = []
    while total:
        r = rng.randrange(total)
        k = 0
        while r >= left[k]:
            r -= left[k]
            k += 1
        out.append(parts[k][pos[k]])
        pos[k] += 1
        left[k] -= 1
        total -= 1
    return out


def play_out(
    tree: ProcessTree,
    count: int,
    seed: int,
    loop_continue_prob: float = DEFAULT_LOOP_CONTINUE,
    case_prefix: str = "case_",
    start_time: int = _BASE_TIMESTAMP,
) -> EventLog:
    """Sample ``count`` traces from ``tree``. Deterministic for a given seed."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if not 0.0 < loop_continue_prob < 1.0:
        raise ValueError("loop_continue_prob must lie in (0, 1)")
    rng = random.Random(seed)
    traces = []
    clock = start_time
    for k in range(count):
        case = f"{case_prefix}{k}"
        events = []
        for a in _sample(tree, rng, loop_continue_prob):
            events.append(Event(a, case, clock))
            clock += _EVENT_STEP_MS
        traces.append(Trace(case, tuple(events)))
    return EventLog(traces)


# ---------------------------------------------------------------------------
# change patterns

def parse_selector(text: str | Sequence[int] | None) -> tuple[int, ...]:
    """``"2.0.1"`` -> ``(2, 0, 1)``; ``""``/``"root"`` selects the root."""
    if text is None:
        return ()
    if not isinstance(text, str):
        return tuple(int(k) for k in text)
    text = text.strip()
    if text in ("", "root", "."):
        return ()
    try:
        return tuple(int(k) for k in text.split("."))
    except ValueError:
        raise PatternError(f"bad selector {text!r}; expected dot-separated child indices") from None


def _fresh_label(tree: ProcessTree) -> str:
    used = tree.activities()
    for cand in "TUVWXYZ":
        if cand not in used:
            return cand
    k = 1
    while f"X{k}" in used:
        k += 1
    return f"X{k}"


def _node(op, kids) -> ProcessTree:
    kids = list(kids)
    if len(kids) == 1:
        return kids[0]
    return ProcessTree(op, tuple(kids))


def _sibling_pair(tree, path, parent_op, pattern):
    if not path:
        raise PatternError(f"{pattern} needs a fragment with a next sibling, got the root")
    parent = tree.subtree(path[:-1])
    k = path[-1]
    if parent.operator is not parent_op:
        raise PatternError(
            f"{pattern}: fragment {path} must sit in a {parent_op.value} node, "
            f"found {parent.operator.value if parent.operator else 'leaf'}"
        )
    if k + 1 >= len(parent.children):
        raise PatternError(f"{pattern}: fragment {path} has no next sibling")
    return parent, k


def _resequence(tree, path, op, pattern) -> ProcessTree:
    """Shared by pl and cf: op(F1, F2) -> seq and seq(.., F1, F2, ..) -> op(F1, F2)."""
    node = tree.subtree(path)
    if node.operator is op:
        if path:
            parent = tree.subtree(path[:-1])
            if parent.operator is Operator.SEQUENCE:
                k = path[-1]
                kids = parent.children[:k] + node.children + parent.children[k + 1:]
                return tree.replace(path[:-1], ProcessTree(Operator.SEQUENCE, kids))
        return tree.replace(path, ProcessTree(Operator.SEQUENCE, node.children))
    parent, k = _sibling_pair(tree, path, Operator.SEQUENCE, pattern)
    block = ProcessTree(op, parent.children[k:k + 2])
    kids = parent.children[:k] + (block,) + parent.children[k + 2:]
    return tree.replace(path[:-1], _node(Operator.SEQUENCE, kids))


def _remove(tree, path) -> ProcessTree:
    if not path:
        raise PatternError("re: cannot remove the root")
    parent = tree.subtree(path[:-1])
    k = path[-1]
    kids = parent.children[:k] + parent.children[k + 1:]
    if parent.operator is Operator.LOOP and k == 0:
        raise PatternError("re: cannot remove a loop body")
    if parent.operator is Operator.LOOP and len(kids) == 1:
        return tree.replace(path[:-1], kids[0])
    return tree.replace(path[:-1], _node(parent.operator, kids))


def apply_pattern(
    tree: ProcessTree,
    pattern: str,
    selector=None,
    fragment: ProcessTree | str | None = None,
) -> ProcessTree:
    """Return a changed copy of ``tree``.

    ``selector`` is a path of child indices (or ``"2.0.1"`` text) to the
    fragment. Two-fragment patterns (pl, cf, sw) use the selected node and its
    next sibling inside a sequence; pl/cf applied to an existing parallel/choice
    node turn it back into a sequence. cb and lp wrap the fragment, or unwrap it
    when it is already wrapped. ``fragment`` is inserted by re and substituted by
    rp (a fresh activity by default).
    """
    if pattern not in PATTERNS:
        raise PatternError(
            f"unsupported pattern {pattern!r}; supported: {', '.join(PATTERNS)}"
        )
    path = parse_selector(selector)
    if isinstance(fragment, str):
        fragment = parse_tree(fragment)
    try:
        node = tree.subtree(path)
    except IndexError as exc:
        raise PatternError(str(exc)) from None

    if pattern == "cb":
        if node.operator is Operator.XOR and len(node.children) == 2:
            rest = [c for c in node.children if not c.is_silent]
            if len(rest) == 1:
                return tree.replace(path, rest[0])
        return tree.replace(path, xor(node, tau()))
    if pattern == "lp":
        if node.operator is Operator.LOOP and len(node.children) == 2 and node.children[1].is_silent:
            return tree.replace(path, node.children[0])
        return tree.replace(path, loop(node, tau()))
    if pattern == "pl":
        return _resequence(tree, path, Operator.PARALLEL, pattern)
    if pattern == "cf":
        return _resequence(tree, path, Operator.XOR, pattern)
    if pattern == "sw":
        parent, k = _sibling_pair(tree, path, Operator.SEQUENCE, pattern)
        kids = list(parent.children)
        kids[k], kids[k + 1] = kids[k + 1], kids[k]
        return tree.replace(path[:-1], ProcessTree(Operator.SEQUENCE, tuple(kids)))
    if pattern == "re":
        if fragment is None:
            return _remove(tree, path)
        if not path:
            return seq(fragment, tree)
        parent = tree.subtree(path[:-1])
        if parent.operator is not Operator.SEQUENCE:
            raise PatternError("re: insertion needs a fragment inside a sequence")
        k = path[-1]
        kids = parent.children[:k] + (fragment,) + parent.children[k:]
        return tree.replace(path[:-1], ProcessTree(Operator.SEQUENCE, kids))
    if pattern == "rp":
        if fragment is None:
            fragment = leaf(_fresh_label(tree))
        return tree.replace(path, fragment)
    # cp: a second copy of the fragment after its next sibling in the sequence
    if not path:
        raise PatternError("cp: cannot duplicate the root")
    parent = tree.subtree(path[:-1])
    if parent.operator is not Operator.SEQUENCE:
        raise PatternError("cp: fragment must sit in a sequence")
    k = path[-1]
    at = min(k + 2, len(parent.children))
    kids = parent.children[:at] + (node,) + parent.children[at:]
    return tree.replace(path[:-1], ProcessTree(Operator.SEQUENCE, kids))


# ---------------------------------------------------------------------------
# splicing and corpus entries

@dataclass(frozen=True)
class LabeledCorpusEntry:
    log: EventLog
    truth: GroundTruth
    provenance: dict


def _relabel(trace: Trace, case: str) -> Trace:
    return Trace(case, tuple(Event(e.activity, case, e.timestamp) for e in trace.events))


def splice(base_log: EventLog, variant_log: EventLog, segment: int, total: int | None = None,
           epsilon: int | None = None) -> LabeledCorpusEntry:
    """Alternate ``segment``-sized chunks of ``base_log`` and ``variant_log``
    (base first) into one log of ``total`` traces (default: both logs' sizes).

    Cases are renamed ``case_<k>`` by final position and timestamps are made
    monotone across the spliced log.
    """
    if segment < 1:
        raise ValueError("segment must be >= 1")
    if total is None:
        total = len(base_log) + len(variant_log)
    k = total // segment
    if k < 2:
        raise ValueError(f"{total} traces with segment {segment} give fewer than 2 segments")
    need_base, need_variant = (k + 1) // 2, k // 2
    if len(base_log) < need_base * segment or len(variant_log) < need_variant * segment:
        raise ValueError(
            f"need {need_base * segment} base and {need_variant * segment} variant traces, "
            f"got {len(base_log)} and {len(variant_log)}"
        )
    chosen = []
    for s in range(k):
        src = base_log if s % 2 == 0 else variant_log
        off = (s // 2) * segment
        chosen.extend(src.traces[off:off + segment])
    traces, clock = [], _BASE_TIMESTAMP
    for j, t in enumerate(chosen):
        case = f"case_{j}"
        events = []
        for e in t.events:
            events.append(Event(e.activity, case, clock))
            clock += _EVENT_STEP_MS
        traces.append(Trace(case, tuple(events)))
    log = EventLog(traces)
    if epsilon is None:
        epsilon = default_epsilon(len(log))
    truth = GroundTruth(tuple(segment * s for s in range(1, k)), epsilon)
    return LabeledCorpusEntry(log, truth, {"segment": segment})


def generate_entry(
    tree: ProcessTree,
    pattern: str,
    selector=None,
    size: int = 2500,
    period: int = 250,
    seed: int = 0,
    fragment=None,
    loop_continue_prob: float = DEFAULT_LOOP_CONTINUE,
    model_name: str | None = None,
) -> LabeledCorpusEntry:
    """Drifting log of ``size`` traces switching between ``tree`` and its
    ``pattern`` variant every ``period`` traces."""
    if size % period or size // period < 2:
        raise ValueError("period must divide size into at least 2 segments")
    if selector is None and model_name in BUILTIN_MODELS:
        selector = DEFAULT_SELECTORS[pattern] if pattern in DEFAULT_SELECTORS else None
    path = parse_selector(selector)
    variant = apply_pattern(tree, pattern, path, fragment)
    rng = random.Random(seed)
    base_seed, variant_seed = rng.randrange(2**32), rng.randrange(2**32)
    segments = size // period
    base = play_out(tree, ((segments + 1) // 2) * period, base_seed, loop_continue_prob)
    var = play_out(variant, (segments // 2) * period, variant_seed, loop_continue_prob)
    entry = splice(base, var, period, total=size)
    provenance = {
        "base_model": model_name or format_tree(tree),
        "base_tree": format_tree(tree),
        "variant_tree": format_tree(variant),
        "pattern": pattern,
        "selector": ".".join(map(str, path)),
        "size": size,
        "period": period,
        "seed": seed,
        "loop_continue_prob": loop_continue_prob,
    }
    return LabeledCorpusEntry(entry.log, entry.truth, provenance)


def write_entry(entry: LabeledCorpusEntry, directory) -> None:
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "log.xes"), "wb") as fh:
        fh.write(serialize_log(entry.log, "xes"))
    with open(os.path.join(directory, "truth.json"), "w", encoding="utf-8") as fh:
        fh.write(entry.truth.to_json() + "\n")
    with open(os.path.join(directory, "provenance.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(entry.provenance, sort_keys=True, indent=2) + "\n")
