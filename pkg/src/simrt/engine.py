"""Deterministic discrete-event simulator.

Tasks are routed by the scheduler at the instant they become ready
(dependencies met, release time reached). Each local execution walks the
setup / input-transfer / kernel / output-copy phases of its offload
breakdown; cloud executions complete after a sampled latency without
occupying a local unit. Image buffers are acquired when a producing task
completes and released as soon as the consuming task starts its kernel
phase; acquiring from a full pool drops the image and skips its
dependents.

Event ordering is total and reproducible: events fire in (time,
completions-before-releases, insertion sequence) order, so a run is a pure
function of (scenario, profile, policy, config) and two runs emit
byte-identical traces.
"""

import heapq
import random
from dataclasses import dataclass
from typing import NamedTuple

from . import scheduler as sched
from .errors import InvalidScenario, UnderflowRelease, UnresolvableCost
from .profiles import (PlatformProfile, SetupMode, UnitKind, cloud_latency,
                       energy_of, offload_time)
from .scheduler import Policy, RouteClass, SchedulerState
from .tasks import TaskGraph, validate_graph

PHASE_DISPATCH = "dispatch"
PHASE_SETUP = "setup"
PHASE_XFER_IN = "xfer_in"
PHASE_KERNEL = "kernel"
PHASE_XFER_OUT = "xfer_out"
PHASE_COMPLETE = "complete"
PHASE_DROP = "drop"
PHASE_CLOUD_SUBMIT = "cloud_submit"
PHASE_CLOUD_COMPLETE = "cloud_complete"

# queue labels used in dispatch records for non-unit routes
LABEL_HP = "HP"
LABEL_CLOUD = "CLOUD"

_PRIO_COMPLETION = 0
_PRIO_RELEASE = 1

_PENDING, _DISPATCHED, _DONE, _SKIPPED = range(4)


@dataclass(frozen=True)
class TraceRecord:
    time_us: int
    task_id: int
    workload: str
    unit: str
    phase: str


CSV_HEADER = "time_us,task_id,workload,unit,phase"


class Trace:
    """Ordered, append-only record of simulation events."""

    def __init__(self, records=None):
        self.records = list(records or [])

    def append(self, record: TraceRecord) -> None:
        self.records.append(record)

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        lines.extend(
            f"{r.time_us},{r.task_id},{r.workload},{r.unit},{r.phase}"
            for r in self.records
        )
        return "\n".join(lines) + "\n"

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


@dataclass(frozen=True)
class SimConfig:
    setup_mode: SetupMode = SetupMode.AMORTIZED
    seed: int = 0
    buffer_capacity: int | None = None  # None: unlimited pool, no drops
    cloud_slots: int | None = None  # None: unlimited parallel cloud slots
    weights: dict | None = None  # slot overrides, e.g. {"g": 4, "d": 2, "c": 2}
    cloud_in_makespan: bool = True
    fpga_as_gpu: bool = False


class BufferPool:
    """Bounded pool of image buffers; acquiring from a full pool is a drop."""

    def __init__(self, capacity: int | None):
        self.capacity = capacity
        self.in_use = 0
        self.dropped = 0

    def acquire(self) -> bool:
        if self.capacity is None or self.in_use < self.capacity:
            self.in_use += 1
            return True
        self.dropped += 1
        return False

    def release(self) -> None:
        if self.in_use == 0:
            raise UnderflowRelease("image buffer released while none in use")
        self.in_use -= 1


@dataclass(frozen=True)
class Metrics:
    """Run summary: throughput, per-unit mean latency, energy, drops."""

    throughput_tasks_per_ms: float
    avg_latency_ms: dict
    total_energy_uj: int
    drops: int
    makespan_us: int
    completed: int
    skipped: int

    @property
    def total_energy_j(self) -> float:
        return self.total_energy_uj / 1_000_000

    def to_dict(self) -> dict:
        return {
            "throughput_tasks_per_ms": self.throughput_tasks_per_ms,
            "avg_latency_ms": dict(self.avg_latency_ms),
            "total_energy_j": self.total_energy_j,
            "total_energy_uj": self.total_energy_uj,
            "drops": self.drops,
            "makespan_us": self.makespan_us,
            "completed": self.completed,
            "skipped": self.skipped,
        }


class SimResult(NamedTuple):
    metrics: Metrics
    trace: Trace


def compute_metrics(trace: Trace, profile: PlatformProfile, config: SimConfig,
                    scenario: TaskGraph | None = None) -> Metrics:
    """Derive run metrics from a trace.

    Throughput is completed tasks per millisecond of makespan; latency is
    dispatch-to-completion, averaged per completing unit; energy sums each
    completed task's per-run energy plus any configured idle power over the
    makespan.
    """
    dispatch_t = {}
    completes = []
    drops = 0
    for r in trace.records:
        if r.phase == PHASE_DISPATCH:
            dispatch_t[r.task_id] = r.time_us
        elif r.phase == PHASE_COMPLETE:
            completes.append((r.task_id, r.workload, r.unit, r.time_us))
        elif r.phase == PHASE_CLOUD_COMPLETE:
            completes.append((r.task_id, r.workload, LABEL_CLOUD, r.time_us))
        elif r.phase == PHASE_DROP:
            drops += 1

    end_times = [t for (_, _, unit, t) in completes
                 if config.cloud_in_makespan or unit != LABEL_CLOUD]
    start = min(dispatch_t.values()) if dispatch_t else 0
    makespan = max(end_times) - start if end_times else 0

    latencies: dict = {}
    energy_uj = 0
    for tid, workload, unit, t in completes:
        latencies.setdefault(unit, []).append(t - dispatch_t[tid])
        kind = UnitKind.CLOUD if unit == LABEL_CLOUD else UnitKind.parse(unit)
        energy_uj += energy_of(profile, workload, kind)

    idle_watts = sum(u.idle_watts for u in profile.local_units())
    if idle_watts:
        energy_uj += round(idle_watts * makespan)

    unit_order = [u.kind.value for u in profile.local_units()] + [LABEL_CLOUD]
    avg_latency = {
        label: sum(vals) / len(vals) / 1000
        for label in unit_order
        if (vals := latencies.get(label))
    }

    completed = len(completes)
    throughput = completed / (makespan / 1000) if makespan else 0.0
    skipped = len(scenario) - completed if scenario is not None else 0
    return Metrics(
        throughput_tasks_per_ms=throughput,
        avg_latency_ms=avg_latency,
        total_energy_uj=energy_uj,
        drops=drops,
        makespan_us=makespan,
        completed=completed,
        skipped=skipped,
    )


def _check_scenario(scenario: TaskGraph, profile: PlatformProfile,
                    policy: Policy, state: SchedulerState) -> None:
    """Reject scenarios that could route a task somewhere it cannot run."""
    participating = state.units
    needs_basic = False
    for task in scenario:
        route = sched.classify(task) if policy.advanced else RouteClass.BASIC
        if route is RouteClass.CLOUD:
            if not profile.has_cloud:
                raise UnresolvableCost(task.workload, UnitKind.CLOUD)
        elif route is RouteClass.HIGH_PRIORITY:
            if not any(profile.resolvable(task.workload, u) for u in participating):
                raise UnresolvableCost(task.workload, "any participating unit")
        else:
            needs_basic = True
            for unit in participating:
                if not profile.resolvable(task.workload, unit):
                    raise UnresolvableCost(task.workload, unit)
    if needs_basic and not participating:
        raise InvalidScenario("no participating local units with positive weight")


class _Engine:
    def __init__(self, scenario: TaskGraph, profile: PlatformProfile,
                 policy: Policy, config: SimConfig):
        self.scenario = scenario
        self.profile = profile
        self.policy = policy
        self.config = config
        self.rng = random.Random(config.seed)
        self.state = SchedulerState(profile, weights=config.weights,
                                    fpga_as_gpu=config.fpga_as_gpu)
        sched.init_runtime(self.state, profile, config.setup_mode)
        self.pool = BufferPool(config.buffer_capacity)
        self.trace = Trace()
        self.heap = []
        self.seq = 0

        self.status = {t.id: _PENDING for t in scenario}
        self.deps_left = {t.id: len(t.deps) for t in scenario}
        self.dependents = {t.id: [] for t in scenario}
        for t in scenario:
            for dep in sorted(t.deps):
                self.dependents[dep].append(t.id)
        self.image_consumers = {
            t.id: [d for d in self.dependents[t.id]
                   if scenario.task(d).tags.image_input]
            for t in scenario
        }
        self.buffer_refs: dict = {}  # producer id -> live consumer count

        self.busy = {u: False for u in self.state.units}
        self.cloud_active = 0
        self.dispatch_time: dict = {}
        self._phase_plan: dict = {}  # task id -> remaining (time, phase) boundaries

    # -- plumbing ---------------------------------------------------------

    def _push(self, time_us: int, prio: int, kind: str, payload) -> None:
        heapq.heappush(self.heap, (time_us, prio, self.seq, kind, payload))
        self.seq += 1

    def _rec(self, time_us: int, task_id: int, unit: str, phase: str) -> None:
        workload = self.scenario.task(task_id).workload
        self.trace.append(TraceRecord(time_us, task_id, workload, unit, phase))

    # -- dispatch and execution -------------------------------------------

    def run(self) -> SimResult:
        for t in self.scenario:
            self._push(t.release_us, _PRIO_RELEASE, "release", t.id)
        while self.heap:
            time_us, _, _, kind, payload = heapq.heappop(self.heap)
            if kind == "release":
                self._on_release(payload, time_us)
            elif kind == "phase":
                self._on_phase(payload, time_us)
            else:
                self._on_cloud_complete(payload, time_us)

        leftover = [tid for tid, s in self.status.items()
                    if s not in (_DONE, _SKIPPED)]
        if leftover or self.pool.in_use:
            raise RuntimeError(
                f"simulation did not quiesce: pending={leftover} "
                f"buffers_in_use={self.pool.in_use}")
        metrics = compute_metrics(self.trace, self.profile, self.config,
                                  scenario=self.scenario)
        return SimResult(metrics, self.trace)

    def _on_release(self, tid: int, now: int) -> None:
        if self.status[tid] == _PENDING and self.deps_left[tid] == 0:
            self._dispatch(tid, now)

    def _dispatch(self, tid: int, now: int) -> None:
        task = self.scenario.task(tid)
        route = sched.dispatch(self.state, task, self.policy)
        self.status[tid] = _DISPATCHED
        self.dispatch_time[tid] = now
        if route.target is RouteClass.CLOUD:
            self._rec(now, tid, LABEL_CLOUD, PHASE_DISPATCH)
            self._drain_cloud(now)
        elif route.target is RouteClass.HIGH_PRIORITY:
            self._rec(now, tid, LABEL_HP, PHASE_DISPATCH)
            self._kick(now)
        else:
            self._rec(now, tid, route.unit.value, PHASE_DISPATCH)
            self._try_start(route.unit, now)

    def _kick(self, now: int) -> None:
        for unit in self.state.units:
            self._try_start(unit, now)

    def _try_start(self, unit: UnitKind, now: int) -> None:
        if self.busy[unit]:
            return
        tid = sched.on_unit_free(self.state, unit)
        if tid is None:
            return
        self._start(tid, unit, now)

    def _start(self, tid: int, unit: UnitKind, now: int) -> None:
        task = self.scenario.task(tid)
        breakdown = offload_time(
            self.profile, task.workload, unit, self.config.setup_mode,
            unit in self.state.initialized_units)
        self.busy[unit] = True
        self._rec(now, tid, unit.value, PHASE_SETUP)
        boundaries = (
            (now + breakdown.setup_us, PHASE_XFER_IN),
            (now + breakdown.setup_us + breakdown.xfer_in_us, PHASE_KERNEL),
            (now + breakdown.total_us - breakdown.xfer_out_us, PHASE_XFER_OUT),
            (now + breakdown.total_us, PHASE_COMPLETE),
        )
        # each boundary event carries the phase being entered
        self._phase_plan[tid] = list(boundaries)
        self._push(boundaries[0][0], _PRIO_COMPLETION, "phase", (tid, unit))

    def _on_phase(self, payload, now: int) -> None:
        tid, unit = payload
        boundary_time, phase = self._phase_plan[tid].pop(0)
        assert boundary_time == now
        if phase == PHASE_COMPLETE:
            del self._phase_plan[tid]
            self._complete_local(tid, unit, now)
            return
        self._rec(now, tid, unit.value, phase)
        if phase == PHASE_KERNEL:
            self._release_buffers_for(tid)
        self._push(self._phase_plan[tid][0][0], _PRIO_COMPLETION, "phase", (tid, unit))

    def _release_buffers_for(self, tid: int) -> None:
        task = self.scenario.task(tid)
        if not task.tags.image_input:
            return
        for producer in sorted(task.deps):
            if producer in self.buffer_refs:
                self.buffer_refs[producer] -= 1
                if self.buffer_refs[producer] == 0:
                    self.pool.release()
                    del self.buffer_refs[producer]

    def _complete_local(self, tid: int, unit: UnitKind, now: int) -> None:
        self._rec(now, tid, unit.value, PHASE_COMPLETE)
        self.status[tid] = _DONE
        self.busy[unit] = False
        self._after_completion(tid, unit.value, now)
        self._try_start(unit, now)

    def _on_cloud_complete(self, tid: int, now: int) -> None:
        self._rec(now, tid, LABEL_CLOUD, PHASE_CLOUD_COMPLETE)
        self.status[tid] = _DONE
        self.cloud_active -= 1
        self._after_completion(tid, LABEL_CLOUD, now)
        self._drain_cloud(now)

    def _after_completion(self, tid: int, unit_label: str, now: int) -> None:
        self._acquire_buffer(tid, unit_label, now)
        for dep in self.dependents[tid]:
            self.deps_left[dep] -= 1
            if (self.status[dep] == _PENDING and self.deps_left[dep] == 0
                    and self.scenario.task(dep).release_us <= now):
                self._dispatch(dep, now)

    def _acquire_buffer(self, tid: int, unit_label: str, now: int) -> None:
        consumers = [c for c in self.image_consumers[tid]
                     if self.status[c] != _SKIPPED]
        if not consumers:
            return
        if self.pool.acquire():
            self.buffer_refs[tid] = len(consumers)
        else:
            self._rec(now, tid, unit_label, PHASE_DROP)
            for consumer in consumers:
                self._skip(consumer)

    def _skip(self, tid: int) -> None:
        stack = [tid]
        while stack:
            cur = stack.pop()
            if self.status[cur] == _SKIPPED:
                continue
            if self.status[cur] != _PENDING:
                raise RuntimeError(f"cannot skip task {cur}: already dispatched")
            self.status[cur] = _SKIPPED
            self._release_buffers_for(cur)
            for dep in self.dependents[cur]:
                if self.status[dep] == _PENDING:
                    stack.append(dep)

    def _drain_cloud(self, now: int) -> None:
        slots = self.config.cloud_slots
        while self.state.cloud_queue and (slots is None or self.cloud_active < slots):
            tid = self.state.cloud_queue.popleft()
            self.cloud_active += 1
            self._rec(now, tid, LABEL_CLOUD, PHASE_CLOUD_SUBMIT)
            # an image consumer needs its input only until upload
            self._release_buffers_for(tid)
            latency = cloud_latency(self.profile, self.rng)
            self._push(now + latency, _PRIO_COMPLETION, "cloud", tid)


def simulate(scenario: TaskGraph, profile: PlatformProfile, policy: Policy,
             config: SimConfig = SimConfig()) -> SimResult:
    """Run a scenario to quiescence and return (Metrics, Trace).

    The result is a pure function of the arguments: identical inputs and
    seed produce identical metrics and a byte-identical trace.
    """
    validate_graph(scenario)
    engine = _Engine(scenario, profile, policy, config)
    _check_scenario(scenario, profile, policy, engine.state)
    return engine.run()
