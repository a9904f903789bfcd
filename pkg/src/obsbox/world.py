"""God's-eye world description: an object catalog, the presentation mechanism
that brings objects into contact with the detector, and the partition
machinery for splitting a pairwise interaction generator into labeled block
sums.

Everything here is immutable after construction and all operations are pure,
so values can be shared freely across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import kernels
from .errors import ConfigurationError, ContractViolation

PARTITION_LABELS = ("S", "E", "O")


@dataclass(frozen=True)
class WorldObject:
    id: int
    width: float

    def __post_init__(self):
        if not (self.width > 0 and np.isfinite(self.width)):
            raise ConfigurationError(
                f"object {self.id}: width must be positive and finite"
            )


@dataclass(frozen=True)
class WorldSpec:
    """Object catalog plus the detector predicate that classifies it.

    The matching/non-matching counts are always derived from the catalog and
    the detector parameters, never stored.
    """

    objects: tuple
    target_width: float = 1.0
    tolerance: float = 1e-6

    def __post_init__(self):
        objects = tuple(self.objects)
        object.__setattr__(self, "objects", objects)
        if not objects:
            raise ConfigurationError("world needs at least one object")
        ids = [o.id for o in objects]
        if len(set(ids)) != len(ids):
            raise ConfigurationError("object ids must be unique")
        if self.target_width <= 0:
            raise ConfigurationError("target width must be positive")
        if self.tolerance < 0:
            raise ConfigurationError("tolerance must be non-negative")

    def matches(self, width: float) -> bool:
        return abs(width - self.target_width) <= self.tolerance

    @property
    def widths(self) -> np.ndarray:
        return np.array([o.width for o in self.objects], dtype=np.float64)

    @property
    def ids(self) -> np.ndarray:
        return np.array([o.id for o in self.objects], dtype=np.int64)

    @property
    def n_matching(self) -> int:
        return int(sum(1 for o in self.objects if self.matches(o.width)))

    @property
    def n_other(self) -> int:
        return len(self.objects) - self.n_matching


@dataclass(frozen=True)
class CyclicSchedule:
    """Reversible mechanism: one fixed permutation of the catalog per period."""

    permutation: tuple

    def __post_init__(self):
        object.__setattr__(self, "permutation", tuple(int(i) for i in self.permutation))
        if sorted(self.permutation) != list(range(len(self.permutation))):
            raise ConfigurationError("permutation must be a bijection on 0..N-1")


@dataclass(frozen=True)
class SeededUniformSchedule:
    """Ergodic-like mechanism: iid uniform picks from a seeded stream."""

    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & ((1 << 64) - 1))


PresentationSchedule = Union[CyclicSchedule, SeededUniformSchedule]


def _check_bound(spec: WorldSpec, schedule) -> None:
    if isinstance(schedule, CyclicSchedule):
        if len(schedule.permutation) != len(spec.objects):
            raise ConfigurationError(
                "permutation length must equal the object count"
            )
    elif not isinstance(schedule, SeededUniformSchedule):
        raise ConfigurationError(f"unknown schedule {schedule!r}")


def presentation_positions(
    spec: WorldSpec, schedule: PresentationSchedule, t0: int, t1: int
) -> np.ndarray:
    """Catalog positions presented over ticks [t0, t1).

    The seeded-uniform stream is defined sequentially (tick t's draw follows
    tick t-1's), so positions are generated from tick 0 and sliced.
    """
    if t0 < 0 or t1 < t0:
        raise ContractViolation("need 0 <= t0 <= t1")
    _check_bound(spec, schedule)
    n = len(spec.objects)
    if isinstance(schedule, CyclicSchedule):
        perm = np.asarray(schedule.permutation, dtype=np.int64)
        return perm[np.arange(t0, t1, dtype=np.int64) % n]
    return kernels.uniform_indices(schedule.seed, n, t1)[t0:]


def presentation_ids(
    spec: WorldSpec, schedule: PresentationSchedule, t0: int, t1: int
) -> np.ndarray:
    """Object ids presented over ticks [t0, t1)."""
    return spec.ids[presentation_positions(spec, schedule, t0, t1)]


def next_presentation(spec: WorldSpec, schedule: PresentationSchedule, tick: int) -> int:
    """Object id in contact with the detector at the given tick."""
    if tick < 0:
        raise ContractViolation("tick must be non-negative")
    return int(presentation_ids(spec, schedule, tick, tick + 1)[0])


def reverse_window(
    spec: WorldSpec, schedule: PresentationSchedule, t0: int, t1: int
) -> np.ndarray:
    """Presented ids over [t0, t1), reversed. Applying it twice restores the
    forward sequence."""
    if not (0 <= t0 < t1):
        raise ContractViolation("need 0 <= t0 < t1")
    return presentation_ids(spec, schedule, t0, t1)[::-1]


# -- partition block sums -----------------------------------------------------


@dataclass(frozen=True)
class BlockSums:
    """The seven labeled block sums of a pairwise generator.

    `seo` is identically zero: a pairwise generator has no three-way entries,
    but the slot is still reported.
    """

    s: float
    e: float
    o: float
    se: float
    so: float
    eo: float
    seo: float

    def total(self) -> float:
        return self.s + self.e + self.o + self.se + self.so + self.eo + self.seo

    def to_dict(self) -> dict:
        return {
            "H_S": self.s,
            "H_E": self.e,
            "H_O": self.o,
            "H_SE": self.se,
            "H_SO": self.so,
            "H_EO": self.eo,
            "H_SEO": self.seo,
            "total": self.total(),
        }


def decompose(generator, labels: Sequence[str]) -> BlockSums:
    """Split a square interaction matrix into block sums by index labels.

    Entries are accumulated in ascending (row, column) order so independent
    implementations agree bit-for-bit. When every partial sum is exactly
    representable (integer or dyadic entries) the block totals are exactly
    invariant under relabeling; for arbitrary floats the invariance holds to
    rounding.
    """
    g = np.asarray(generator, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ContractViolation("generator must be a square matrix")
    if not np.all(np.isfinite(g)):
        raise ConfigurationError("generator entries must be finite")
    n = g.shape[0]
    labels = list(labels)
    if len(labels) != n:
        raise ContractViolation("labeling must cover every matrix index")
    for lab in labels:
        if lab not in PARTITION_LABELS:
            raise ContractViolation(f"unknown partition label {lab!r}")

    sums = {"S": 0.0, "E": 0.0, "O": 0.0, "SE": 0.0, "SO": 0.0, "EO": 0.0}
    pair_key = {
        frozenset(("S", "E")): "SE",
        frozenset(("S", "O")): "SO",
        frozenset(("E", "O")): "EO",
    }
    rows = g.tolist()
    for i in range(n):
        li = labels[i]
        row = rows[i]
        for j in range(n):
            lj = labels[j]
            if li == lj:
                sums[li] += row[j]
            else:
                sums[pair_key[frozenset((li, lj))]] += row[j]
    return BlockSums(
        s=sums["S"],
        e=sums["E"],
        o=sums["O"],
        se=sums["SE"],
        so=sums["SO"],
        eo=sums["EO"],
        seo=0.0,
    )


# -- JSON interface -----------------------------------------------------------


def schedule_from_dict(data: dict) -> PresentationSchedule:
    kind = data.get("kind")
    if kind == "cyclic":
        if "permutation" not in data:
            raise ConfigurationError("cyclic schedule needs a permutation")
        return CyclicSchedule(permutation=tuple(data["permutation"]))
    if kind == "seeded-uniform":
        return SeededUniformSchedule(seed=int(data.get("seed", 0)))
    raise ConfigurationError(f"unknown schedule kind {kind!r}")


def schedule_to_dict(schedule: PresentationSchedule) -> dict:
    if isinstance(schedule, CyclicSchedule):
        return {"kind": "cyclic", "permutation": list(schedule.permutation)}
    return {"kind": "seeded-uniform", "seed": schedule.seed}


def load_world(
    data, target_width: float = 1.0, tolerance: float = 1e-6
):
    """Build (WorldSpec, schedule) from a world document (dict or JSON text).

    Expected shape: {"objects": [{"id": 0, "width_m": 1.0}, ...],
    "schedule": {"kind": ..., ...}}. Widths in meters.
    """
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"world document is not valid JSON: {exc}")
    if not isinstance(data, dict) or "objects" not in data:
        raise ConfigurationError("world document needs an 'objects' list")
    try:
        objects = tuple(
            WorldObject(id=int(o["id"]), width=float(o["width_m"]))
            for o in data["objects"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad object entry: {exc}")
    spec = WorldSpec(objects=objects, target_width=target_width, tolerance=tolerance)
    schedule = schedule_from_dict(data.get("schedule", {"kind": "seeded-uniform"}))
    _check_bound(spec, schedule)
    return spec, schedule


def dump_world(spec: WorldSpec, schedule: PresentationSchedule) -> dict:
    return {
        "objects": [{"id": o.id, "width_m": o.width} for o in spec.objects],
        "schedule": schedule_to_dict(schedule),
    }
