"""Processing-unit definitions and the per-(workload, unit) cost model.

A profile holds the units available on a platform, the workloads it knows
how to run, and a cost entry per (workload, unit) pair: setup time, input
transfer, kernel execution, output copy-back, and energy. Kernel time can
be derived from an operation count and a unit's theoretical throughput
when no measured value is given. Cloud execution is modeled with a fixed
per-inference energy and a latency drawn uniformly from a closed interval.
"""

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .errors import BadInterval, MissingCost, NegativeValue, ParseError


class UnitKind(Enum):
    CPU = "CPU"
    MGPU = "mGPU"
    DSP = "DSP"
    GPU = "GPU"
    FPGA = "FPGA"
    CLOUD = "CLOUD"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "UnitKind":
        for kind in cls:
            if kind.value.upper() == text.upper():
                return kind
        raise ParseError(f"unknown unit kind {text!r}")


class SetupMode(Enum):
    """Whether accelerator setup is paid once at startup or on every offload."""

    AMORTIZED = "amortized"
    PER_OFFLOAD = "per_offload"

    @classmethod
    def parse(cls, text: str) -> "SetupMode":
        for mode in cls:
            if mode.value == text.lower().replace("-", "_"):
                return mode
        raise ParseError(f"unknown setup mode {text!r}")


@dataclass(frozen=True)
class UnitSpec:
    kind: UnitKind
    weight: int = 1
    gops: float | None = None  # theoretical throughput, giga-ops per second
    idle_watts: float = 0.0

    @property
    def ops_per_sec(self) -> int | None:
        if self.gops is None:
            return None
        return int(round(self.gops * 1_000_000_000))


@dataclass(frozen=True)
class WorkloadSpec:
    name: str
    ops: int | None = None


@dataclass(frozen=True)
class CostEntry:
    setup_us: int = 0
    xfer_in_us: int = 0
    kernel_us: int | None = None  # derivable from ops/throughput when absent
    xfer_out_us: int = 0
    energy_uj: int = 0


@dataclass(frozen=True)
class OffloadBreakdown:
    setup_us: int
    xfer_in_us: int
    kernel_us: int
    xfer_out_us: int

    @property
    def total_us(self) -> int:
        return self.setup_us + self.xfer_in_us + self.kernel_us + self.xfer_out_us


@dataclass(frozen=True)
class PlatformProfile:
    name: str
    units: tuple
    workloads: dict
    costs: dict  # (workload name, UnitKind) -> CostEntry
    cloud_latency_us: tuple | None = None
    cloud_energy_uj: int | None = None

    def unit(self, kind: UnitKind) -> UnitSpec | None:
        for u in self.units:
            if u.kind == kind:
                return u
        return None

    def local_units(self) -> tuple:
        return tuple(u for u in self.units if u.kind != UnitKind.CLOUD)

    @property
    def has_cloud(self) -> bool:
        return self.cloud_latency_us is not None

    def cost(self, workload: str, unit: UnitKind) -> CostEntry | None:
        return self.costs.get((workload, unit))

    def resolvable(self, workload: str, unit: UnitKind) -> bool:
        """True when a full offload breakdown can be produced for the pair."""
        entry = self.costs.get((workload, unit))
        if entry is None:
            return False
        if entry.kernel_us is not None:
            return True
        spec = self.workloads.get(workload)
        uspec = self.unit(unit)
        return bool(spec is not None and spec.ops is not None
                    and uspec is not None and uspec.ops_per_sec)


def kernel_time(profile: PlatformProfile, workload: str, unit: UnitKind) -> int:
    """Kernel execution time in microseconds.

    An explicit measured value wins; otherwise the time is derived from the
    workload's operation count and the unit's theoretical throughput, rounded
    up to the next microsecond.
    """
    entry = profile.cost(workload, unit)
    if entry is None:
        raise MissingCost(workload, unit)
    if entry.kernel_us is not None:
        return entry.kernel_us
    spec = profile.workloads.get(workload)
    uspec = profile.unit(unit)
    if spec is None or spec.ops is None or uspec is None or not uspec.ops_per_sec:
        raise MissingCost(workload, unit)
    scaled = spec.ops * 1_000_000
    return -(-scaled // uspec.ops_per_sec)


def offload_time(
    profile: PlatformProfile,
    workload: str,
    unit: UnitKind,
    setup_mode: SetupMode,
    unit_initialized: bool,
) -> OffloadBreakdown:
    """Full offload cost breakdown for one dispatch.

    PER_OFFLOAD charges setup on every call; AMORTIZED charges it only when
    the unit has not been initialized yet.
    """
    entry = profile.cost(workload, unit)
    if entry is None:
        raise MissingCost(workload, unit)
    setup = entry.setup_us
    if setup_mode is SetupMode.AMORTIZED and unit_initialized:
        setup = 0
    return OffloadBreakdown(
        setup_us=setup,
        xfer_in_us=entry.xfer_in_us,
        kernel_us=kernel_time(profile, workload, unit),
        xfer_out_us=entry.xfer_out_us,
    )


def energy_of(profile: PlatformProfile, workload: str, unit: UnitKind) -> int:
    """Per-execution energy in microjoules; cloud runs cost the flat cloud energy."""
    if unit is UnitKind.CLOUD:
        if profile.cloud_energy_uj is None:
            raise MissingCost(workload, unit)
        return profile.cloud_energy_uj
    entry = profile.cost(workload, unit)
    if entry is None:
        raise MissingCost(workload, unit)
    return entry.energy_uj


def cloud_latency(profile: PlatformProfile, rng: random.Random) -> int:
    """One latency sample, uniform over the closed configured interval."""
    if profile.cloud_latency_us is None:
        raise MissingCost("<any>", UnitKind.CLOUD)
    lo, hi = profile.cloud_latency_us
    return rng.randint(lo, hi)


def restrict(profile: PlatformProfile, kinds: Iterable[UnitKind]) -> PlatformProfile:
    """Profile limited to the given unit kinds; used for pinned-unit runs."""
    keep = set(kinds)
    units = tuple(u for u in profile.units if u.kind in keep)
    costs = {k: v for k, v in profile.costs.items() if k[1] in keep}
    has_cloud = UnitKind.CLOUD in keep and profile.has_cloud
    return PlatformProfile(
        name=f"{profile.name}[{'+'.join(str(u.kind) for u in units)}]",
        units=units,
        workloads=dict(profile.workloads),
        costs=costs,
        cloud_latency_us=profile.cloud_latency_us if has_cloud else None,
        cloud_energy_uj=profile.cloud_energy_uj if has_cloud else None,
    )


def preference_matrix(profile: PlatformProfile) -> dict:
    """Per-workload (performance-preferable, energy-preferable) local units.

    Performance is argmin of kernel time, energy argmin of per-run energy,
    over the local units with a resolvable cost. Ties break on unit
    declaration order.
    """
    order = {u.kind: i for i, u in enumerate(profile.units)}
    matrix = {}
    for name in profile.workloads:
        units = [u.kind for u in profile.local_units() if profile.resolvable(name, u.kind)]
        if not units:
            continue
        perf = min(units, key=lambda u: (kernel_time(profile, name, u), order[u]))
        energy = min(units, key=lambda u: (energy_of(profile, name, u), order[u]))
        matrix[name] = (perf, energy)
    return matrix


_UNIT_KEYS = {"kind", "weight", "gops", "idle_watts"}

# ad-hoc queue weights applied when a profile omits the field
_DEFAULT_WEIGHTS = {
    UnitKind.CPU: 2,
    UnitKind.MGPU: 4,
    UnitKind.GPU: 4,
    UnitKind.DSP: 2,
    UnitKind.FPGA: 1,
    UnitKind.CLOUD: 0,
}
_WORKLOAD_KEYS = {"name", "ops"}
_COST_KEYS = {"setup_us", "xfer_in_us", "kernel_us", "xfer_out_us", "energy_uj"}
_CLOUD_KEYS = {"latency_us", "energy_uj"}


def _check_non_negative(value, fieldname: str, loc: str):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{fieldname} must be an integer", loc)
    if value < 0:
        raise NegativeValue(f"{loc}.{fieldname}", value)
    return value


def load_profile(text: str, name: str = "") -> PlatformProfile:
    """Parse and validate a platform profile JSON document.

    Every declared cost entry must be resolvable: an explicit kernel time,
    or an operation count paired with the unit's theoretical throughput.
    Unknown keys are rejected.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", "profile") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", "profile")
    extra = set(doc) - {"name", "units", "workloads", "costs", "cloud"}
    if extra:
        raise ParseError(f"unknown keys: {sorted(extra)}", "profile")
    name = doc.get("name", name)

    units = []
    for i, obj in enumerate(doc.get("units", [])):
        loc = f"units[{i}]"
        if not isinstance(obj, dict):
            raise ParseError("unit must be an object", loc)
        extra = set(obj) - _UNIT_KEYS
        if extra:
            raise ParseError(f"unknown keys: {sorted(extra)}", loc)
        if "kind" not in obj:
            raise ParseError("missing 'kind'", loc)
        kind = UnitKind.parse(obj["kind"])
        weight = obj.get("weight", _DEFAULT_WEIGHTS[kind])
        _check_non_negative(weight, "weight", loc)
        gops = obj.get("gops")
        if gops is not None:
            if isinstance(gops, bool) or not isinstance(gops, (int, float)):
                raise ParseError("'gops' must be a number", loc)
            if gops <= 0:
                raise NegativeValue(f"{loc}.gops", gops)
        idle = obj.get("idle_watts", 0.0)
        if isinstance(idle, bool) or not isinstance(idle, (int, float)) or idle < 0:
            raise NegativeValue(f"{loc}.idle_watts", idle)
        if any(u.kind == kind for u in units):
            raise ParseError(f"unit kind {kind} declared twice", loc)
        units.append(UnitSpec(kind=kind, weight=weight, gops=gops, idle_watts=float(idle)))
    kinds = {u.kind for u in units}
    if UnitKind.GPU in kinds and UnitKind.MGPU in kinds:
        raise ParseError("profile may declare at most one of GPU and mGPU", "units")

    workloads = {}
    for i, obj in enumerate(doc.get("workloads", [])):
        loc = f"workloads[{i}]"
        if not isinstance(obj, dict):
            raise ParseError("workload must be an object", loc)
        extra = set(obj) - _WORKLOAD_KEYS
        if extra:
            raise ParseError(f"unknown keys: {sorted(extra)}", loc)
        wname = obj.get("name")
        if not isinstance(wname, str) or not wname:
            raise ParseError("'name' must be a non-empty string", loc)
        if wname in workloads:
            raise ParseError(f"workload {wname!r} declared twice", loc)
        ops = obj.get("ops")
        if ops is not None:
            _check_non_negative(ops, "ops", loc)
        workloads[wname] = WorkloadSpec(name=wname, ops=ops)

    costs = {}
    for key, obj in doc.get("costs", {}).items():
        loc = f"costs[{key!r}]"
        if "@" not in key:
            raise ParseError("cost key must be 'workload@UNIT'", loc)
        wname, _, kindname = key.rpartition("@")
        if wname not in workloads:
            raise ParseError(f"cost references undeclared workload {wname!r}", loc)
        kind = UnitKind.parse(kindname)
        if kind not in kinds:
            raise ParseError(f"cost references undeclared unit {kind}", loc)
        if not isinstance(obj, dict):
            raise ParseError("cost entry must be an object", loc)
        extra = set(obj) - _COST_KEYS
        if extra:
            raise ParseError(f"unknown keys: {sorted(extra)}", loc)
        kernel = obj.get("kernel_us")
        if kernel is not None:
            kernel = _check_non_negative(kernel, "kernel_us", loc)
        entry = CostEntry(
            setup_us=_check_non_negative(obj.get("setup_us", 0), "setup_us", loc),
            xfer_in_us=_check_non_negative(obj.get("xfer_in_us", 0), "xfer_in_us", loc),
            kernel_us=kernel,
            xfer_out_us=_check_non_negative(obj.get("xfer_out_us", 0), "xfer_out_us", loc),
            energy_uj=_check_non_negative(obj.get("energy_uj", 0), "energy_uj", loc),
        )
        if (wname, kind) in costs:
            raise ParseError(f"duplicate cost entry {key!r}", loc)
        costs[(wname, kind)] = entry

    cloud_latency_us = None
    cloud_energy_uj = None
    if "cloud" in doc:
        obj = doc["cloud"]
        loc = "cloud"
        if not isinstance(obj, dict):
            raise ParseError("'cloud' must be an object", loc)
        extra = set(obj) - _CLOUD_KEYS
        if extra:
            raise ParseError(f"unknown keys: {sorted(extra)}", loc)
        interval = obj.get("latency_us")
        if (not isinstance(interval, list) or len(interval) != 2
                or any(isinstance(v, bool) or not isinstance(v, int) for v in interval)):
            raise BadInterval("cloud.latency_us must be [lo, hi] integers")
        lo, hi = interval
        if lo < 0 or hi < 0:
            raise NegativeValue("cloud.latency_us", interval)
        if lo > hi:
            raise BadInterval(f"cloud latency interval has lo > hi: [{lo}, {hi}]")
        cloud_latency_us = (lo, hi)
        cloud_energy_uj = _check_non_negative(obj.get("energy_uj", 0), "energy_uj", loc)
        if UnitKind.CLOUD not in kinds:
            units.append(UnitSpec(kind=UnitKind.CLOUD, weight=0))
            kinds.add(UnitKind.CLOUD)

    profile = PlatformProfile(
        name=name,
        units=tuple(units),
        workloads=workloads,
        costs=costs,
        cloud_latency_us=cloud_latency_us,
        cloud_energy_uj=cloud_energy_uj,
    )
    # Every declared cost entry must be usable as-is.
    for (wname, kind) in costs:
        if not profile.resolvable(wname, kind):
            raise MissingCost(wname, kind)
    return profile


def builtin_profiles() -> dict:
    """Named set of calibrated builtin profiles."""
    from .builtins import BUILTIN_PROFILE_TEXTS

    return {name: load_profile(text, name=name)
            for name, text in BUILTIN_PROFILE_TEXTS.items()}
