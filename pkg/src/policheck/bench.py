"""Benchmark instance families and the per-phase timing harness.

Two synthetic families stress the two component kinds:

* ``enum``: an N-value enumeration; P allows every value individually, Q is
  the single full-wildcard policy.  Both implication directions hold.
* ``wildcard``: a bounded string (alphanumeric plus ``/`` and ``*``, max
  length 100); P allows the N literals ``a1b2c3d4e5/i`` and Q the N globs
  ``a1b2c3d4e5/i*`` (0-based i).  P implies Q but not conversely.

Each measured point reports four phases: data load (policy-set
construction), encoding into the constraint IR, and the two implication
directions.  Backend-internal work (automata construction, SMT script
emission, solver subprocess) lands in the implication phases.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .core import (
    CharSet,
    MatchingStrategy,
    Policy,
    PolicySet,
    PolicyType,
    StringComponentDef,
    StringEnumComponentDef,
)
from .errors import UnknownFamily
from .formula import encode_policy_set

CSV_COMMENT = (
    "# per-phase wall-clock seconds (monotonic); process startup and JIT "
    "warmup are excluded"
)
CSV_HEADER = (
    "family,n,repeat,backend,load_s,encode_s,p_implies_q_s,q_implies_p_s,"
    "verdict_pq,verdict_qp"
)

FAMILIES = ("enum", "wildcard")

_WILDCARD_BASE = "a1b2c3d4e5/"


@dataclass(frozen=True)
class BenchRecord:
    family: str
    n: int
    repeat: int
    backend: str
    load_s: float
    encode_s: float
    p_implies_q_s: float
    q_implies_p_s: float
    verdict_pq: str
    verdict_qp: str

    def to_csv_row(self) -> str:
        return (
            f"{self.family},{self.n},{self.repeat},{self.backend},"
            f"{self.load_s:.6f},{self.encode_s:.6f},"
            f"{self.p_implies_q_s:.6f},{self.q_implies_p_s:.6f},"
            f"{self.verdict_pq},{self.verdict_qp}"
        )

    @classmethod
    def from_csv_row(cls, row: str) -> "BenchRecord":
        parts = row.strip().split(",")
        if len(parts) != 10:
            raise ValueError(f"expected 10 CSV fields, got {len(parts)}")
        return cls(
            family=parts[0],
            n=int(parts[1]),
            repeat=int(parts[2]),
            backend=parts[3],
            load_s=float(parts[4]),
            encode_s=float(parts[5]),
            p_implies_q_s=float(parts[6]),
            q_implies_p_s=float(parts[7]),
            verdict_pq=parts[8],
            verdict_qp=parts[9],
        )


def enum_family(n: int) -> tuple[PolicySet, PolicySet]:
    if n < 1:
        raise ValueError("n must be positive")
    comp = StringEnumComponentDef(
        "value", tuple(str(i) for i in range(n)), MatchingStrategy.WILDCARD
    )
    pt = PolicyType("enum_bench", (comp,))
    p = PolicySet(pt, tuple(Policy(pt, (str(i),), "allow") for i in range(n)))
    q = PolicySet(pt, (Policy(pt, ("*",), "allow"),))
    return p, q


_WILDCARD_CHARSET = CharSet.from_string(
    "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz/*"
)


def wildcard_family(n: int) -> tuple[PolicySet, PolicySet]:
    if n < 1:
        raise ValueError("n must be positive")
    comp = StringComponentDef("path", _WILDCARD_CHARSET, 100, MatchingStrategy.WILDCARD)
    pt = PolicyType("wildcard_bench", (comp,))
    p = PolicySet(
        pt, tuple(Policy(pt, (f"{_WILDCARD_BASE}{i}",), "allow") for i in range(n))
    )
    q = PolicySet(
        pt, tuple(Policy(pt, (f"{_WILDCARD_BASE}{i}*",), "allow") for i in range(n))
    )
    return p, q


def make_family(family: str, n: int) -> tuple[PolicySet, PolicySet]:
    if family == "enum":
        return enum_family(n)
    if family == "wildcard":
        return wildcard_family(n)
    raise UnknownFamily(f"unknown benchmark family {family!r} (know: {FAMILIES})")


def run_point(family: str, n: int, repeat: int, backend, budget=None) -> BenchRecord:
    """Measure one (family, n) instance on one backend."""
    t0 = time.monotonic()
    p, q = make_family(family, n)
    load_s = time.monotonic() - t0

    t0 = time.monotonic()
    encode_policy_set(p)
    encode_policy_set(q)
    encode_s = time.monotonic() - t0

    t0 = time.monotonic()
    v_pq = backend.check_implication(p, q, budget)
    pq_s = time.monotonic() - t0

    t0 = time.monotonic()
    v_qp = backend.check_implication(q, p, budget)
    qp_s = time.monotonic() - t0

    return BenchRecord(
        family=family,
        n=n,
        repeat=repeat,
        backend=backend.name,
        load_s=load_s,
        encode_s=encode_s,
        p_implies_q_s=pq_s,
        q_implies_p_s=qp_s,
        verdict_pq=v_pq.kind.value,
        verdict_qp=v_qp.kind.value,
    )
