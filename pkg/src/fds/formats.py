"""Versioned text formats for trees, schedules and composites.

fds-tree 1        one line per non-empty level: "<level>: <i> <i> ...",
                  indices in decimal, sorted ascending; parsing rejects
                  prefix-closure violations.
fds-schedule 1    run lines "<count> <c>" with c in {1, 2}, counts summing
                  to the declared depth.
fds-composite 1   "origin <0|1>" then one "component <shift> <spec>" line
                  per component, where <spec> is either an inline run list
                  "runs:<count>x<c>,..." or a path to an fds-schedule file
                  (resolved relative to the composite file).
"""

from __future__ import annotations

import os
from typing import Union

from .dyadic import DyadicTree
from .errors import FormatError
from .schedule import BranchingSchedule, CompositeSet

__all__ = [
    "write_tree",
    "write_schedule",
    "write_composite",
    "dump",
    "load",
]

SetLike = Union[DyadicTree, BranchingSchedule, CompositeSet]


def write_tree(t: DyadicTree) -> str:
    lines = ["fds-tree 1", f"depth {t.depth}"]
    for m, xs in enumerate(t.levels):
        if xs:
            lines.append(f"{m}: " + " ".join(str(k) for k in xs))
    return "\n".join(lines) + "\n"


def write_schedule(s: BranchingSchedule) -> str:
    lines = ["fds-schedule 1", f"depth {s.depth}"]
    lines.extend(f"{cnt} {c}" for cnt, c in s.runs)
    return "\n".join(lines) + "\n"


def _inline_runs(s: BranchingSchedule) -> str:
    return "runs:" + ",".join(f"{cnt}x{c}" for cnt, c in s.runs)


def write_composite(cs: CompositeSet) -> str:
    lines = ["fds-composite 1", f"origin {int(cs.include_origin)}"]
    lines.extend(f"component {e} {_inline_runs(s)}" for e, s in cs.components)
    return "\n".join(lines) + "\n"


def dump(obj: SetLike, path: str) -> None:
    if isinstance(obj, DyadicTree):
        text = write_tree(obj)
    elif isinstance(obj, BranchingSchedule):
        text = write_schedule(obj)
    elif isinstance(obj, CompositeSet):
        text = write_composite(obj)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text)


def _lines(text: str) -> list[str]:
    return [ln.rstrip() for ln in text.splitlines() if ln.strip()]


def parse_tree(text: str) -> DyadicTree:
    lines = _lines(text)
    if not lines or lines[0] != "fds-tree 1":
        raise FormatError("not an fds-tree file")
    if len(lines) < 2 or not lines[1].startswith("depth "):
        raise FormatError("missing depth line")
    try:
        depth = int(lines[1].split()[1])
    except (IndexError, ValueError) as exc:
        raise FormatError("bad depth line") from exc
    if depth < 0:
        raise FormatError(f"negative depth {depth}")
    levels: list[list[int]] = [[] for _ in range(depth + 1)]
    for ln in lines[2:]:
        head, _, rest = ln.partition(":")
        try:
            m = int(head)
            xs = [int(tok) for tok in rest.split()]
        except ValueError as exc:
            raise FormatError(f"bad level line {ln!r}") from exc
        if not 0 <= m <= depth:
            raise FormatError(f"level {m} outside depth {depth}")
        if levels[m]:
            raise FormatError(f"duplicate level line for level {m}")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise FormatError(f"indices at level {m} not strictly ascending")
        if xs and not 0 <= xs[0] <= xs[-1] < (1 << m):
            raise FormatError(f"index out of range at level {m}")
        levels[m] = xs
    tree = DyadicTree(levels)
    present = [set(xs) for xs in tree.levels]
    for m in range(1, depth + 1):
        for k in tree.levels[m]:
            if (k >> 1) not in present[m - 1]:
                raise FormatError(
                    f"prefix closure violated: ({m}, {k}) present, "
                    f"({m - 1}, {k >> 1}) absent"
                )
    return tree


def _parse_runs_token(token: str) -> BranchingSchedule:
    body = token[len("runs:") :]
    runs = []
    for part in body.split(","):
        cnt, _, c = part.partition("x")
        try:
            runs.append((int(cnt), int(c)))
        except ValueError as exc:
            raise FormatError(f"bad run token {part!r}") from exc
    try:
        return BranchingSchedule(runs)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def parse_schedule(text: str) -> BranchingSchedule:
    lines = _lines(text)
    if not lines or lines[0] != "fds-schedule 1":
        raise FormatError("not an fds-schedule file")
    if len(lines) < 2 or not lines[1].startswith("depth "):
        raise FormatError("missing depth line")
    try:
        depth = int(lines[1].split()[1])
    except (IndexError, ValueError) as exc:
        raise FormatError("bad depth line") from exc
    runs = []
    for ln in lines[2:]:
        toks = ln.split()
        if len(toks) != 2:
            raise FormatError(f"bad run line {ln!r}")
        try:
            runs.append((int(toks[0]), int(toks[1])))
        except ValueError as exc:
            raise FormatError(f"bad run line {ln!r}") from exc
    try:
        sched = BranchingSchedule(runs)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    if sched.depth != depth:
        raise FormatError(f"run lengths sum to {sched.depth}, declared {depth}")
    return sched


def parse_composite(text: str, base_dir: str = ".") -> CompositeSet:
    lines = _lines(text)
    if not lines or lines[0] != "fds-composite 1":
        raise FormatError("not an fds-composite file")
    if len(lines) < 2 or not lines[1].startswith("origin "):
        raise FormatError("missing origin line")
    token = lines[1].split()[1]
    if token not in ("0", "1"):
        raise FormatError(f"origin flag must be 0 or 1, got {token!r}")
    origin = token == "1"
    comps = []
    for ln in lines[2:]:
        toks = ln.split(maxsplit=2)
        if len(toks) != 3 or toks[0] != "component":
            raise FormatError(f"bad component line {ln!r}")
        try:
            shift = int(toks[1])
        except ValueError as exc:
            raise FormatError(f"bad shift in {ln!r}") from exc
        spec = toks[2]
        if spec.startswith("runs:"):
            sched = _parse_runs_token(spec)
        else:
            sub = spec if os.path.isabs(spec) else os.path.join(base_dir, spec)
            with open(sub, encoding="ascii") as fh:
                sched = parse_schedule(fh.read())
        comps.append((shift, sched))
    try:
        return CompositeSet(comps, include_origin=origin)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def load(path: str) -> SetLike:
    """Read any fds set file, dispatching on its header line."""
    with open(path, encoding="ascii") as fh:
        text = fh.read()
    head = text.splitlines()[0].strip() if text.strip() else ""
    if head == "fds-tree 1":
        return parse_tree(text)
    if head == "fds-schedule 1":
        return parse_schedule(text)
    if head == "fds-composite 1":
        return parse_composite(text, os.path.dirname(os.path.abspath(path)))
    raise FormatError(f"unrecognized set file header {head!r}")
