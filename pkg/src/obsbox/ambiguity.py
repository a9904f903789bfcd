"""Constructions showing what a bit stream cannot pin down: box internals
(surprise pairs), the provenance of a state change (substitution pairs), and
the direction of time (reversal count identities).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, DomainError
from .observer import MeterStick
from .world import WorldSpec


@dataclass(frozen=True)
class MooreBox:
    """Finite-state box: output is read from the current state, then the
    state advances. Only the output stream crosses the boundary."""

    outputs: tuple
    transitions: tuple
    initial: int = 0

    def __post_init__(self):
        k = len(self.outputs)
        if k == 0 or len(self.transitions) != k:
            raise ContractViolation("outputs and transitions must be equal-length")
        if any(b not in (0, 1) for b in self.outputs):
            raise ContractViolation("outputs must be bits")
        if any(not (0 <= t < k) for t in self.transitions):
            raise ContractViolation("transition target out of range")
        if not (0 <= self.initial < k):
            raise ContractViolation("initial state out of range")

    @property
    def n_states(self) -> int:
        return len(self.outputs)

    def run(self, n: int) -> np.ndarray:
        """First n outputs."""
        bits = np.empty(n, dtype=np.uint8)
        state = self.initial
        outputs, transitions = self.outputs, self.transitions
        for i in range(n):
            bits[i] = outputs[state]
            state = transitions[state]
        return bits

    def to_dict(self) -> dict:
        return {
            "states": self.n_states,
            "initial": self.initial,
            "delta": list(self.transitions),
            "out": list(self.outputs),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MooreBox":
        box = cls(
            outputs=tuple(int(b) for b in data["out"]),
            transitions=tuple(int(t) for t in data["delta"]),
            initial=int(data.get("initial", 0)),
        )
        if "states" in data and int(data["states"]) != box.n_states:
            raise ContractViolation("declared state count disagrees with tables")
        return box


def surprise_pair(prefix) -> tuple:
    """Two boxes that agree on exactly the given prefix and then diverge.

    A is the minimal machine emitting the prefix and then its last bit
    forever: positions after the last bit that differs from the final bit all
    share the same output future, so they collapse into one looping state
    (earlier chain positions are pairwise distinct, since matching futures
    would force the final differing bit to equal the constant tail). B keeps
    the full chain and appends one divergent state, so B always has strictly
    more states than A.
    """
    prefix = [int(b) for b in np.asarray(prefix).ravel()]
    n = len(prefix)
    if n == 0:
        raise DomainError("prefix must be non-empty")
    if any(b not in (0, 1) for b in prefix):
        raise DomainError("prefix must be bits")
    last = prefix[-1]

    t = -1
    for i in range(n - 1, -1, -1):
        if prefix[i] != last:
            t = i
            break
    box_a = MooreBox(
        outputs=tuple(prefix[: t + 1]) + (last,),
        transitions=tuple(range(1, t + 2)) + (t + 1,),
    )
    box_b = MooreBox(
        outputs=tuple(prefix) + (1 - last,),
        transitions=tuple(range(1, n + 1)) + (n,),
    )
    return box_a, box_b


@dataclass(frozen=True)
class GodsEyeHistory:
    """Stipulated full history: (tick, object id, width) per presentation.

    This is the theorist's view; the observer only ever sees the measured
    bits.
    """

    entries: tuple

    def __post_init__(self):
        ticks = [e[0] for e in self.entries]
        if any(t2 <= t1 for t1, t2 in zip(ticks, ticks[1:])):
            raise ContractViolation("ticks must be strictly increasing")

    def __len__(self) -> int:
        return len(self.entries)

    def replay(self, stick: MeterStick) -> np.ndarray:
        """Bits the observer would have recorded under this history."""
        return np.array(
            [1 if stick.matches(w) else 0 for _, _, w in self.entries],
            dtype=np.uint8,
        )

    def object_ids(self) -> np.ndarray:
        return np.array([e[1] for e in self.entries], dtype=np.int64)

    def to_jsonl(self) -> str:
        return "".join(
            f'{{"tick":{t},"id":{i},"width_m":{w!r}}}\n' for t, i, w in self.entries
        )


def substitution_pair(stream, spec: WorldSpec) -> tuple:
    """Two god's-eye histories that both replay the stream bit-for-bit.

    H1 keeps a single object in contact and toggles its width between a
    matching and a non-matching catalog value. H2 presents fixed-width
    catalog objects, choosing an id different from H1's whenever the catalog
    allows. Identical streams, different provenance.
    """
    ticks = stream.ticks
    bits = stream.bits
    if ticks.size == 0:
        raise DomainError("stream must be non-empty")
    matching = [o for o in spec.objects if spec.matches(o.width)]
    others = [o for o in spec.objects if not spec.matches(o.width)]
    if not matching or not others:
        raise DomainError("need at least one matching and one non-matching object")

    anchor = matching[0]
    other = others[0]
    alt = next((o for o in matching if o.id != anchor.id), anchor)

    h1 = tuple(
        (int(t), anchor.id, anchor.width if b else other.width)
        for t, b in zip(ticks, bits)
    )
    h2 = tuple(
        (int(t), alt.id, alt.width) if b else (int(t), other.id, other.width)
        for t, b in zip(ticks, bits)
    )
    return GodsEyeHistory(entries=h1), GodsEyeHistory(entries=h2)


@dataclass(eq=False)
class ReversalCounts:
    """Unigram and bigram tallies of a stream and its reversal.

    bigrams[a, b] counts occurrences of the consecutive pattern (a, b). The
    identities unigrams_fwd == unigrams_rev and bigrams_rev[a, b] ==
    bigrams_fwd[b, a] are combinatorial, not statistical.
    """

    unigrams_forward: np.ndarray
    unigrams_reversed: np.ndarray
    bigrams_forward: np.ndarray
    bigrams_reversed: np.ndarray

    def to_dict(self) -> dict:
        return {
            "unigrams_forward": [int(c) for c in self.unigrams_forward],
            "unigrams_reversed": [int(c) for c in self.unigrams_reversed],
            "bigrams_forward": [[int(c) for c in row] for row in self.bigrams_forward],
            "bigrams_reversed": [[int(c) for c in row] for row in self.bigrams_reversed],
        }


def _bigrams(bits: np.ndarray) -> np.ndarray:
    pairs = 2 * bits[:-1].astype(np.int64) + bits[1:]
    return np.bincount(pairs, minlength=4).reshape(2, 2)


def reversal_counts(stream) -> ReversalCounts:
    """Count unigrams and bigrams of the stream read forward and backward."""
    bits = stream.bits if hasattr(stream, "bits") else np.asarray(stream)
    bits = np.asarray(bits, dtype=np.int64)
    if bits.size < 2:
        raise DomainError("need at least two bits")
    rev = bits[::-1]
    return ReversalCounts(
        unigrams_forward=np.bincount(bits, minlength=2),
        unigrams_reversed=np.bincount(rev, minlength=2),
        bigrams_forward=_bigrams(bits),
        bigrams_reversed=_bigrams(rev),
    )
