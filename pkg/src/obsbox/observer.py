"""The blindfolded one-bit observer: a meter-stick detector, a tick clock,
an outcome stream, and an exact free-energy ledger for the bits it records.
"""

from __future__ import annotations

import json
import math
from array import array
from dataclasses import dataclass, field

import numpy as np

from . import world
from .errors import ContractViolation, DomainError

# Exact SI value, J/K.
BOLTZMANN_K = 1.380649e-23
# Exact SI value, J*s; used only for reporting ratios.
PLANCK_H = 6.62607015e-34
# The bit-cost coefficient. The exact-ln2 reading is available via flag.
LANDAUER_COEFF = 0.7


@dataclass(frozen=True)
class MeterStick:
    """Detector predicate: emits 1 iff the presented width is within
    tolerance of the target (closed interval)."""

    target_width: float = 1.0
    tolerance: float = 1e-6

    def __post_init__(self):
        if self.target_width <= 0:
            raise DomainError("target width must be positive")
        if self.tolerance < 0:
            raise DomainError("tolerance must be non-negative")

    def matches(self, width: float) -> bool:
        return abs(width - self.target_width) <= self.tolerance


@dataclass(frozen=True)
class ObserverClock:
    """Constant-period tick clock defining observer-relative time."""

    delta_t: float
    ticks: int = 0

    def __post_init__(self):
        if self.delta_t <= 0:
            raise DomainError("delta_t must be positive")
        if self.ticks < 0:
            raise DomainError("ticks must be non-negative")

    def elapsed(self) -> float:
        return self.delta_t * self.ticks


@dataclass
class EnergyLedger:
    """Free-energy cost of recorded bits.

    The energy is always computed as bits * coefficient * k * T in a single
    multiplication, so the exactness invariant cannot drift with the number
    of records.
    """

    temperature: float
    bits_recorded: int = 0
    coefficient: float = field(default=LANDAUER_COEFF)

    def __post_init__(self):
        if self.temperature <= 0:
            raise DomainError("temperature must be positive")

    @property
    def bit_cost(self) -> float:
        """Joules per recorded bit at this temperature."""
        return self.coefficient * BOLTZMANN_K * self.temperature

    @property
    def free_energy(self) -> float:
        return self.bits_recorded * self.bit_cost

    def to_dict(self, delta_t: float) -> dict:
        return {
            "temperature_K": self.temperature,
            "bits": self.bits_recorded,
            "joules": self.free_energy,
            "action_quantum_Js": action_quantum_with_coeff(
                self.temperature, delta_t, self.coefficient
            ),
        }


class OutcomeStream:
    """Append-only (tick, bit) sequence with strictly increasing ticks."""

    __slots__ = ("_ticks", "_bits")

    def __init__(self):
        self._ticks = array("q")
        self._bits = array("B")

    @classmethod
    def from_arrays(cls, ticks, bits) -> "OutcomeStream":
        ticks = np.asarray(ticks, dtype=np.int64)
        bits = np.asarray(bits, dtype=np.uint8)
        if ticks.shape != bits.shape or ticks.ndim != 1:
            raise ContractViolation("ticks and bits must be equal-length 1-d")
        if ticks.size and np.any(np.diff(ticks) <= 0):
            raise ContractViolation("ticks must be strictly increasing")
        if np.any(bits > 1):
            raise ContractViolation("bits must be 0 or 1")
        stream = cls()
        stream._ticks.frombytes(ticks.tobytes())
        stream._bits.frombytes(bits.tobytes())
        return stream

    def append(self, tick: int, bit: int) -> None:
        if self._ticks and tick <= self._ticks[-1]:
            raise ContractViolation(
                f"tick {tick} not greater than last recorded {self._ticks[-1]}"
            )
        if bit not in (0, 1):
            raise ContractViolation("bit must be 0 or 1")
        self._ticks.append(tick)
        self._bits.append(bit)

    def __len__(self) -> int:
        return len(self._bits)

    def __iter__(self):
        return zip(self._ticks, self._bits)

    @property
    def ticks(self) -> np.ndarray:
        return np.frombuffer(self._ticks, dtype=np.int64).copy()

    @property
    def bits(self) -> np.ndarray:
        return np.frombuffer(self._bits, dtype=np.uint8).copy()

    def counts(self):
        """(zeros, ones) tallies."""
        ones = int(sum(self._bits))
        return len(self._bits) - ones, ones

    def to_jsonl(self) -> str:
        return "".join(
            f'{{"tick":{t},"bit":{b}}}\n' for t, b in zip(self._ticks, self._bits)
        )

    @classmethod
    def from_jsonl(cls, text: str) -> "OutcomeStream":
        stream = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            stream.append(int(rec["tick"]), int(rec["bit"]))
        return stream


def measure(stick: MeterStick, obj: world.WorldObject) -> int:
    """1 iff the object's width matches the stick's target within tolerance."""
    return 1 if stick.matches(obj.width) else 0


def record(ledger: EnergyLedger, stream: OutcomeStream, tick: int, bit: int):
    """Record one outcome: append to the stream and charge one bit's cost.

    Mutates both arguments and returns them for chaining.
    """
    stream.append(tick, bit)
    ledger.bits_recorded += 1
    return ledger, stream


def action_quantum(temperature: float, delta_t: float, exact_ln2: bool = False) -> float:
    """Minimal action to receive and encode one bit over one tick."""
    coeff = math.log(2) if exact_ln2 else LANDAUER_COEFF
    return action_quantum_with_coeff(temperature, delta_t, coeff)


def action_quantum_with_coeff(temperature: float, delta_t: float, coeff: float) -> float:
    if temperature <= 0:
        raise DomainError("temperature must be positive")
    if delta_t <= 0:
        raise DomainError("delta_t must be positive")
    return coeff * BOLTZMANN_K * temperature * delta_t


def run_session(
    spec: world.WorldSpec,
    schedule,
    stick: MeterStick,
    temperature: float,
    delta_t: float,
    ticks: int,
):
    """Run the observer for `ticks` clock ticks against the given world.

    Each tick presents one object, measures it, and records the bit. Returns
    (OutcomeStream, EnergyLedger). Deterministic for fixed inputs.
    """
    if ticks < 0:
        raise ContractViolation("ticks must be non-negative")
    ObserverClock(delta_t=delta_t, ticks=ticks)  # validates the clock parameters
    ledger = EnergyLedger(temperature=temperature)
    if ticks == 0:
        return OutcomeStream(), ledger
    positions = world.presentation_positions(spec, schedule, 0, ticks)
    widths = spec.widths[positions]
    bits = (np.abs(widths - stick.target_width) <= stick.tolerance).astype(np.uint8)
    stream = OutcomeStream.from_arrays(np.arange(ticks, dtype=np.int64), bits)
    ledger.bits_recorded = ticks
    return stream, ledger
