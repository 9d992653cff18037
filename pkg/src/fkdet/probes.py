"""Exploratory runs on open questions.  Results are logged, never asserted.

Each probe returns a :class:`ProbeResult` whose ``label`` says so.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .determinants import (
    boyd_scan,
    folner_det_sequence,
    mahler_jensen,
    orthogonal_chain,
    quotient_det,
)
from .groupring import GroupRingElement, positive_square, tilde
from .groups import Heisenberg, IntegerLattice, folner_set, quotient_hom
from .laurent import from_groupring

LABEL = "probe, not assertion"


@dataclass
class ProbeResult:
    name: str
    rows: list = field(default_factory=list)
    summary: str = ""
    label: str = LABEL


def non_invertible_quotients(f: GroupRingElement | None = None, ns=range(1, 17)) -> ProbeResult:
    """Finite-quotient estimates for an element that is not invertible in L1.

    The default f = 1 - x has m = 0, yet 1 - x is singular on every Z/n, so
    every finite estimate is -inf: the limit formula fails without invertibility.
    """
    Z = IntegerLattice(1)
    if f is None:
        f = GroupRingElement.parse("1 - x", Z)
    record = mahler_jensen(from_groupring(f)).value
    rows = []
    for n in ns:
        est = quotient_det(quotient_hom(f.model, moduli=n), f)
        rows.append({"n": n, "quotient": est.value, "jensen": record})
    diverged = sum(1 for r in rows if r["quotient"] == -math.inf)
    summary = (
        f"{diverged}/{len(rows)} quotient estimates are -inf against Jensen value {record:.6g}: "
        "discrepancy, the finite-quotient limit does not recover the determinant"
        if diverged
        else f"finite estimates stay finite; record value {record:.6g}"
    )
    return ProbeResult("noninvertible", rows, summary)


def folner_shape_dependence(f: GroupRingElement | None = None, sizes=(2, 3, 4)) -> ProbeResult:
    """Compare two Folner sequences of H3(Z) (box and tall) on the same element."""
    H = Heisenberg()
    if f is None:
        f = GroupRingElement.parse("5 + x + x^-1 + y + y^-1", H)
    rows = []
    for n in sizes:
        box = folner_det_sequence(f, [n], "box")[0].value
        tall = folner_det_sequence(f, [n], "tall")[0].value
        rows.append({"n": n, "box": box, "tall": tall, "gap": abs(box - tall)})
    return ProbeResult("folner-shape", rows, f"final gap {rows[-1]['gap']:.3g}" if rows else "")


def heisenberg_orthogonal(f: GroupRingElement | None = None, n: int = 2, m: int = 4) -> ProbeResult:
    """log det of the reversed orthogonal element over H3, estimated on Folner sets.

    Over Z this is always >= 0; over H3 it is unknown.  Uses the chain given by
    the box of size ``n`` and a Folner estimate of size ``m`` for Phi~* Phi~.
    """
    H = Heisenberg()
    if f is None:
        f = GroupRingElement.parse("5 + x + x^-1 + y + y^-1", H)
    chain = list(folner_set(H, n).elements)
    last = orthogonal_chain(f, chain)[-1]
    phi = GroupRingElement(H, dict(zip(chain, last.coefficients)))
    est = folner_det_sequence(positive_square(tilde(phi)), [m])[0].value / 2
    row = {"chain": len(chain), "folner": m, "log_det": est, "at_least_one": est >= -1e-9}
    return ProbeResult("heisenberg-chain", [row], f"log det estimate {est:.6g}")


def continuity_scan(P, z0: complex = 0.0, z1: complex = 3.0, meshes=(1 / 16, 1 / 64, 1 / 256), N: int = 4096) -> ProbeResult:
    rep = boyd_scan(P, z0, z1, meshes, N)
    verdict = "non-increasing" if rep.holds else "increasing somewhere"
    return ProbeResult("boyd", rep.values["rows"], f"max jumps {verdict} under refinement")
