"""Domain-independent HTN planner.

Tasks are tuples ``(name, *args)`` (a bare string is a task with no
arguments). A name is registered either as a primitive action or as a
compound task refined by an ordered list of methods. ``find_plan`` performs
ordered depth-first search with backtracking and returns the first complete
plan, together with a decomposition trace.
"""

from __future__ import annotations

import copy
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator

Task = tuple


class PlanningError(Exception):
    pass


class PlanningFailure(PlanningError):
    """No decomposition of the todo list succeeds."""


class DepthLimitExceeded(PlanningError):
    pass


class UnknownTask(PlanningError):
    pass


class ReplayError(PlanningError):
    """A plan step was not applicable during replay."""


def _always(state, *args) -> bool:
    return True


@dataclass
class PrimitiveAction:
    name: str
    apply: Callable[..., Any]
    applicable: Callable[..., bool] = _always


@dataclass
class Method:
    task: str
    decompose: Callable[..., list | None]
    applicable: Callable[..., bool] = _always
    name: str = ""

    def __post_init__(self):
        if not self.name:
            self.name = getattr(self.decompose, "__name__", self.task)


@dataclass
class Domain:
    """Registry of primitive actions and methods.

    ``copy_state`` produces the private working copy handed to each action.
    """

    name: str = "domain"
    copy_state: Callable[[Any], Any] = copy.deepcopy
    actions: dict[str, PrimitiveAction] = field(default_factory=dict)
    methods: dict[str, list[Method]] = field(default_factory=dict)

    def declare_action(self, name: str, apply, applicable=None) -> PrimitiveAction:
        if name in self.methods:
            raise ValueError(f"{name!r} is already a compound task")
        act = PrimitiveAction(name, apply, applicable or _always)
        self.actions[name] = act
        return act

    def declare_method(self, task: str, decompose, applicable=None, name: str = "") -> Method:
        if task in self.actions:
            raise ValueError(f"{task!r} is already a primitive action")
        m = Method(task, decompose, applicable or _always, name)
        self.methods.setdefault(task, []).append(m)
        return m

    def is_primitive(self, name: str) -> bool:
        return name in self.actions


@dataclass
class TraceNode:
    task: Task
    method: str | None = None  # None for primitive actions
    children: list["TraceNode"] = field(default_factory=list)
    # (method name, why) for every method tried before the chosen one
    rejected: list[tuple[str, str]] = field(default_factory=list)

    @property
    def is_action(self) -> bool:
        return self.method is None


@dataclass
class Plan:
    actions: list[Task]
    trace: list[TraceNode]

    def __len__(self):
        return len(self.actions)

    def __iter__(self):
        return iter(self.actions)


def as_task(t) -> Task:
    return (t,) if isinstance(t, str) else tuple(t)


def _solve(domain: Domain, state, todo: list[Task], depth: int,
           limit: int) -> Iterator[tuple[Any, list[Task], list[TraceNode]]]:
    if not todo:
        yield state, [], []
        return
    if depth >= limit:
        raise DepthLimitExceeded(f"search depth exceeded {limit}")
    task, rest = todo[0], todo[1:]
    name, args = task[0], task[1:]

    action = domain.actions.get(name)
    if action is not None:
        if not action.applicable(state, *args):
            return
        new_state = action.apply(domain.copy_state(state), *args)
        if new_state is None or new_state is False:
            return
        node = TraceNode(task)
        for s, acts, nodes in _solve(domain, new_state, rest, depth + 1, limit):
            yield s, [task] + acts, [node] + nodes
        return

    methods = domain.methods.get(name)
    if methods is None:
        raise UnknownTask(f"{name!r} is neither an action nor a compound task")
    rejected: list[tuple[str, str]] = []
    for m in methods:
        if not m.applicable(state, *args):
            rejected.append((m.name, "inapplicable"))
            continue
        subtasks = m.decompose(state, *args)
        if subtasks is None or subtasks is False:
            rejected.append((m.name, "inapplicable"))
            continue
        subtasks = [as_task(t) for t in subtasks]
        for s1, acts1, nodes1 in _solve(domain, state, subtasks, depth + 1, limit):
            node = TraceNode(task, m.name, nodes1, list(rejected))
            for s2, acts2, nodes2 in _solve(domain, s1, rest, depth + 1, limit):
                yield s2, acts1 + acts2, [node] + nodes2
        rejected.append((m.name, "failed"))


def find_plan(state, todo, domain: Domain, depth_limit: int = 1000) -> Plan:
    """First plan found by ordered depth-first decomposition of ``todo``.

    Raises PlanningFailure when no decomposition works, DepthLimitExceeded when
    the search goes deeper than ``depth_limit``, UnknownTask for unregistered names.
    """
    if depth_limit <= 0:
        raise ValueError("depth_limit must be positive")
    tasks = [as_task(t) for t in todo]
    # every level of search holds a couple of generator frames
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * depth_limit + 200))
    try:
        for _, actions, trace in _solve(domain, state, tasks, 0, depth_limit):
            return Plan(actions, trace)
    finally:
        sys.setrecursionlimit(old)
    raise PlanningFailure(f"no plan for {tasks}")


def replay(plan: Plan | list, state, domain: Domain):
    """Apply a plan's actions in order, checking applicability at each step."""
    for i, task in enumerate(plan):
        task = as_task(task)
        action = domain.actions.get(task[0])
        if action is None:
            raise ReplayError(f"step {i}: {task[0]!r} is not a primitive action")
        if not action.applicable(state, *task[1:]):
            raise ReplayError(f"step {i}: {task} not applicable")
        new_state = action.apply(domain.copy_state(state), *task[1:])
        if new_state is None or new_state is False:
            raise ReplayError(f"step {i}: {task} failed")
        state = new_state
    return state


def _fmt(task: Task) -> str:
    return f"{task[0]}({', '.join(str(a) for a in task[1:])})"


def render_trace(plan: Plan) -> str:
    lines = [f"plan: {len(plan.actions)} action(s)"]

    def walk(node: TraceNode, indent: int) -> None:
        pad = "  " * indent
        if node.is_action:
            lines.append(f"{pad}- {_fmt(node.task)}")
            return
        for mname, why in node.rejected:
            lines.append(f"{pad}x {_fmt(node.task)} via {mname} [rejected: {why}]")
        lines.append(f"{pad}+ {_fmt(node.task)} via {node.method}")
        for child in node.children:
            walk(child, indent + 1)

    for node in plan.trace:
        walk(node, 1)
    return "\n".join(lines)
