"""Full-information views, decision protocols, bounded simulation, and
the translations between protocols and decision maps.

A view after k rounds is a subdivision vertex: its label is the simplex
of round-(k-1) views the process saw in round k, recursively down to
the input vertex.  Two executions are indistinguishable to a process
exactly when they produce the same view vertex, so view vertices double
as canonical ball representatives of the view ultrametric.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .errors import (
    IncompleteMap,
    InvalidOutput,
    IrrevocabilityViolation,
    NotBoundedBy,
    Unsupported,
)
from .models import ModelSpec, Word, enumerate_prefixes
from .simplicial import Complex, Simplex, SimplicialMap, Vertex, label_string
from .subdivision import (
    apply_schedule,
    coordinates,
    diameter_Dk,
    geometric_distance,
)
from .tasks import Task

# -- views ------------------------------------------------------------------


def view_depth(v: Vertex) -> int:
    depth = 0
    while isinstance(v.label, Simplex):
        v = v.label.vertex_of_color(v.color)
        depth += 1
    return depth


def view_prev(v: Vertex) -> Vertex:
    """The same process's view one round earlier."""
    if not isinstance(v.label, Simplex):
        raise ValueError(f"{v!r} is an initial view")
    return v.label.vertex_of_color(v.color)


def view_ancestor(v: Vertex, t: int) -> Vertex:
    """The view at step t along the chain of v."""
    d = view_depth(v)
    if t > d:
        raise ValueError(f"view has depth {d}, cannot ascend to {t}")
    while d > t:
        v = view_prev(v)
        d -= 1
    return v


def view_input(v: Vertex) -> Vertex:
    return view_ancestor(v, 0)


def view_chain(v: Vertex) -> list[Vertex]:
    """Views at steps 0..depth(v), oldest first."""
    chain = [v]
    while isinstance(v.label, Simplex):
        v = view_prev(v)
        chain.append(v)
    return chain[::-1]


def ball_id(v: Vertex) -> str:
    """Stable printable identity of a view ball."""
    return f"{v.color}:{label_string(v.label)}"


@dataclass(frozen=True)
class Execution:
    """A finite execution shadow: an input face and a schedule word over
    its participants."""

    face: Simplex
    word: Word

    @property
    def participants(self) -> frozenset:
        return frozenset(self.face.colors())

    def describe(self) -> str:
        inputs = ",".join(f"{v.color}={label_string(v.label)}" for v in self.face)
        sched = ",".join(str(s) for s in self.word)
        return f"[{inputs}]({sched})"


def execution_configurations(execution: Execution) -> list[Simplex]:
    """Configurations after rounds 0..len(word); entry t is the simplex of
    all participants' views after t rounds."""
    configs = [execution.face]
    for schedule in execution.word:
        configs.append(apply_schedule(configs[-1], schedule.blocks))
    return configs


def execution_view(execution: Execution, color: int, t: int) -> Vertex:
    return execution_configurations(execution)[t].vertex_of_color(color)


def all_executions(model: ModelSpec, inputs: Complex, depth: int) -> list[Execution]:
    """Every execution shadow of the given depth: one per input simplex
    (participation and inputs) and allowed schedule word over it."""
    out = []
    for face in inputs.simplexes():
        participants = frozenset(face.colors())
        for word in enumerate_prefixes(model, depth, participants):
            out.append(Execution(face, word))
    return out


# -- protocols ---------------------------------------------------------------


@dataclass
class DecisionProtocol:
    """A pure decision function from (color, view vertex) to an output
    label or None.  Determinism and irrevocability are checked by run()."""

    name: str
    decide: Callable[[int, Vertex], object]

    def __call__(self, color: int, view: Vertex):
        return self.decide(color, view)


def constant_protocol(value) -> DecisionProtocol:
    return DecisionProtocol(f"constant:{value}", lambda color, view: value)


def own_input_protocol() -> DecisionProtocol:
    return DecisionProtocol("own-input", lambda color, view: view_input(view).label)


def never_protocol() -> DecisionProtocol:
    return DecisionProtocol("never", lambda color, view: None)


def winner_protocol() -> DecisionProtocol:
    """Two-process rule: whoever hears nothing in round one wins and
    decides its own input; a process that heard the other in round one
    decides the other's input.  Sound in models where the full exchange
    cannot happen in the first round."""

    def decide(color: int, view: Vertex):
        if view_depth(view) < 1:
            return None
        first = view_ancestor(view, 1)
        carrier = first.label
        if carrier.colors() == {color}:
            return view_input(view).label
        others = sorted(carrier.colors() - {color})
        if len(carrier.colors()) != 2 or len(others) != 1:
            raise Unsupported("winner protocol is a two-process rule")
        return view_input(carrier.vertex_of_color(others[0])).label

    return DecisionProtocol("winner", decide)


# -- simulation ---------------------------------------------------------------


@dataclass
class DecisionRecord:
    value: object
    round: int


@dataclass
class ExecutionOutcome:
    execution: Execution
    decisions: dict[int, Optional[DecisionRecord]]

    def all_decided(self) -> bool:
        return all(d is not None for d in self.decisions.values())


@dataclass
class RunResult:
    depth: int
    outcomes: list[ExecutionOutcome]

    def undecided(self) -> list[tuple[Execution, int]]:
        out = []
        for oc in self.outcomes:
            for color, rec in sorted(oc.decisions.items()):
                if rec is None:
                    out.append((oc.execution, color))
        return out


def run(protocol: DecisionProtocol, model: ModelSpec, inputs: Complex, depth: int) -> RunResult:
    """Evaluate the protocol along every execution shadow of the given
    depth, checking irrevocability step by step."""
    outcomes = []
    for execution in all_executions(model, inputs, depth):
        configs = execution_configurations(execution)
        decisions: dict[int, Optional[DecisionRecord]] = {}
        for color in sorted(execution.participants):
            record: Optional[DecisionRecord] = None
            for t, config in enumerate(configs):
                answer = protocol(color, config.vertex_of_color(color))
                if record is None:
                    if answer is not None:
                        record = DecisionRecord(answer, t)
                elif answer != record.value:
                    raise IrrevocabilityViolation(
                        (execution.describe(), color, t, record.value, answer)
                    )
            decisions[color] = record
        outcomes.append(ExecutionOutcome(execution, decisions))
    return RunResult(depth, outcomes)


@dataclass
class SolveReport:
    status: str  # "PASS" | "FAIL" | "UNDECIDED"
    depth: int
    failures: list[tuple[Execution, Simplex]]
    undecided: list[tuple[Execution, int]]
    run_result: RunResult

    @property
    def ok(self) -> bool:
        return self.status == "PASS"


def check_solves(protocol: DecisionProtocol, task: Task, model: ModelSpec, depth: int) -> SolveReport:
    """PASS when every execution shadow is fully decided with a decision
    simplex inside delta of its input face.  Undecided executions are
    inconclusive, not failures: termination is a liveness property."""
    result = run(protocol, model, task.inputs, depth)
    valid_labels = task.output_labels()
    failures = []
    for outcome in result.outcomes:
        if not outcome.all_decided():
            continue
        for color, rec in outcome.decisions.items():
            if rec.value not in valid_labels:
                raise InvalidOutput(
                    f"{protocol.name} decided {rec.value!r}, not an output label"
                )
        decision_simplex = Simplex(
            Vertex(color, rec.value) for color, rec in outcome.decisions.items()
        )
        if decision_simplex not in task.delta(outcome.execution.face):
            failures.append((outcome.execution, decision_simplex))
    undecided = result.undecided()
    if failures:
        status = "FAIL"
    elif undecided:
        status = "UNDECIDED"
    else:
        status = "PASS"
    return SolveReport(status, depth, failures, undecided, result)


# -- protocol from a decision map ---------------------------------------------


def synthesize_from_stable_map(delta: SimplicialMap, tsub, max_depth: int) -> DecisionProtocol:
    """Ball rule over a terminating subdivision: at round k, gather the
    same-color stable vertices within geometric distance D_k of the
    current view and decide their common image label, if unanimous.

    Vertices exactly at distance D_k are included.  `delta` maps the
    geometric stable vertices (color plus exact coordinates) to output
    vertices and must cover every stable vertex it is asked about.
    """
    tsub.materialize(max_depth)
    diameters = {k: diameter_Dk(tsub.base, k) for k in range(max_depth + 1)}
    stable_by_color: dict[int, list[Vertex]] = {}
    stable = tsub.stable_complex(max_depth)
    if stable is not None:
        for v in stable.vertices():
            stable_by_color.setdefault(v.color, []).append(v)

    def attempt(color: int, view: Vertex):
        k = min(view_depth(view), max_depth)
        point = coordinates(view, tsub.base)
        ball = [
            w
            for w in stable_by_color.get(color, [])
            if geometric_distance(point, w.label) <= diameters[k]
        ]
        if not ball:
            return None
        values = set()
        for w in ball:
            if not delta.defined_on(w):
                raise IncompleteMap(f"decision map undefined on stable vertex {w!r}")
            values.add(delta(w).label)
        if len(values) == 1:
            return next(iter(values))
        return None

    def decide(color: int, view: Vertex):
        # decisions are irrevocable: the first round whose ball is
        # unanimous fixes the value for every later view
        for v in view_chain(view):
            answer = attempt(color, v)
            if answer is not None:
                return answer
        return None

    return DecisionProtocol("ball-rule", decide)


def synthesize_from_time_map(delta_T: SimplicialMap, time_complex) -> DecisionProtocol:
    """Prefix rule over a time-T complex: at step t, decide o if every
    ball extending the current t-round view maps to o."""
    T = time_complex.T
    by_prefix: dict[tuple[int, Vertex], set] = {}
    for ball in time_complex.complex.vertices():
        for t in range(T + 1):
            key = (t, view_ancestor(ball, t))
            by_prefix.setdefault(key, set()).add(ball)

    def decide(color: int, view: Vertex):
        t = view_depth(view)
        anchor = view_ancestor(view, T) if t > T else view
        group = by_prefix.get((min(t, T), anchor))
        if not group:
            raise IncompleteMap(f"view {view!r} is outside the time complex")
        values = set()
        for ball in group:
            if not delta_T.defined_on(ball):
                raise IncompleteMap(f"decision map undefined on ball {ball!r}")
            values.add(delta_T(ball).label)
        if len(values) == 1:
            return next(iter(values))
        return None

    return DecisionProtocol(f"table@{T}", decide)


def synthesize_from_map(delta: SimplicialMap, *, tsub=None, time_complex=None, max_depth: int = 0) -> DecisionProtocol:
    if (tsub is None) == (time_complex is None):
        raise Unsupported("pass exactly one of tsub or time_complex")
    if tsub is not None:
        return synthesize_from_stable_map(delta, tsub, max_depth)
    return synthesize_from_time_map(delta, time_complex)


# -- decision map from a protocol ----------------------------------------------


def extract_map(protocol: DecisionProtocol, model: ModelSpec, task: Task, T: int) -> SimplicialMap:
    """Read the protocol's decisions off every depth-T ball.

    Every ball must be decided by round T, else NotBoundedBy(T).  The
    resulting vertex map is chromatic by construction; simpliciality is
    for the caller to check against the output complex.
    """
    from .checker import build_time_T

    time_complex = build_time_T(model, task, T)
    mapping = {}
    for ball in time_complex.complex.vertices():
        value = None
        for t, v in enumerate(view_chain(ball)):
            answer = protocol(ball.color, v)
            if answer is not None:
                value = answer
                break
        if value is None:
            raise NotBoundedBy(T, ball)
        out_vertex = Vertex(ball.color, value)
        if out_vertex not in set(task.outputs.vertices()):
            raise InvalidOutput(f"decided label {value!r} has no output vertex for color {ball.color}")
        mapping[ball] = out_vertex
    return SimplicialMap(mapping)


# -- protocol loading -----------------------------------------------------------


def table_protocol(table: dict[str, object], model: ModelSpec, task: Task, T: int) -> DecisionProtocol:
    """Decision-table protocol: ball id -> output label, applied via the
    time-T prefix rule."""
    from .checker import build_time_T

    time_complex = build_time_T(model, task, T)
    mapping = {}
    for ball in time_complex.complex.vertices():
        if ball_id(ball) not in table:
            raise IncompleteMap(f"decision table missing ball {ball_id(ball)}")
        mapping[ball] = Vertex(ball.color, table[ball_id(ball)])
    proto = synthesize_from_time_map(SimplicialMap(mapping), time_complex)
    proto.name = f"table@{T}"
    return proto


def builtin_protocol(name: str) -> DecisionProtocol:
    if name == "winner":
        return winner_protocol()
    if name == "own-input":
        return own_input_protocol()
    if name == "never":
        return never_protocol()
    if name.startswith("constant:"):
        raw = name.split(":", 1)[1]
        value = int(raw) if raw.lstrip("-").isdigit() else raw
        return constant_protocol(value)
    raise Unsupported(f"unknown protocol {name!r}")
