"""Product-enumeration bounds on joint spectral radii of regime systems.

Lower bounds come from spectral radii of matrix products along switching
sequences; upper bounds from the submultiplicativity of the operator norm.
In the constrained variants the sequences must be admissible under the
system's transition set, and lower bounds only evaluate sequences that close
into admissible cycles (a non-repeatable product does not bound the
constrained growth rate from below).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import RegimeSystem

__all__ = [
    "SpectralBound",
    "spectral_radius",
    "jsr_lower_bound",
    "jsr_upper_bound_norm",
    "DEFAULT_PRODUCT_BUDGET",
]

# cap on matrix multiplications in one enumeration call
DEFAULT_PRODUCT_BUDGET = 10**6


@dataclass(frozen=True)
class SpectralBound:
    """A one-sided bound with its provenance.

    method is one of jsr_lower / cjsr_lower / jsr_upper_norm /
    cjsr_upper_norm for product bounds, or sdp_* / sos_* for certificate
    bounds.  depth_or_degree records the enumeration depth (products) or the
    certificate degree 2m (LMI bounds).  witness is the maximizing state
    sequence for product bounds, or a certificate id for LMI bounds.
    truncated marks results cut short by the multiplication budget.
    """

    method: str
    value: float
    depth_or_degree: int
    witness: tuple[str, ...] | str | None = None
    truncated: bool = False

    def __post_init__(self):
        if not np.isfinite(self.value) or self.value < 0:
            raise ValueError(f"bound value must be finite and >= 0, got {self.value}")


def spectral_radius(M: np.ndarray) -> float:
    """Largest eigenvalue modulus of a square matrix."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix contains non-finite entries")
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def _is_min_rotation(seq: tuple[int, ...]) -> bool:
    """True when seq is lexicographically minimal among its rotations."""
    t = len(seq)
    doubled = seq + seq
    for r in range(1, t):
        if doubled[r : r + t] < seq:
            return False
    return True


def _successors(sys: RegimeSystem, constrained: bool) -> dict[int, tuple[int, ...]]:
    index = {s: i for i, s in enumerate(sys.states)}
    if not constrained:
        every = tuple(range(len(sys.states)))
        return {i: every for i in range(len(sys.states))}
    succ: dict[int, list[int]] = {i: [] for i in range(len(sys.states))}
    for a, b in sys.edges:
        succ[index[a]].append(index[b])
    return {i: tuple(v) for i, v in succ.items()}


def jsr_lower_bound(
    sys: RegimeSystem,
    max_depth: int,
    constrained: bool = False,
    budget: int = DEFAULT_PRODUCT_BUDGET,
) -> SpectralBound:
    """Best lower bound from products of up to max_depth companion matrices.

    Evaluates rho(F[i_t] ... F[i_1])^(1/t) over switching sequences; in the
    constrained case only sequences forming admissible cycles (including the
    wrap-around pair) count.  Only the lexicographically minimal rotation of
    each cyclic class is evaluated, since the spectral radius of a product
    is invariant under cyclic shifts.
    """
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    mats = [sys.companion[s] for s in sys.states]
    succ = _successors(sys, constrained)
    n = len(mats)

    best = 0.0
    best_witness: tuple[int, ...] | None = None
    mults = 0
    truncated = False

    def visit(seq: list[int], prod: np.ndarray):
        nonlocal best, best_witness, mults, truncated
        t = len(seq)
        closes = seq[0] in succ[seq[-1]]
        if closes and _is_min_rotation(tuple(seq)):
            value = spectral_radius(prod) ** (1.0 / t)
            if value > best:
                best = value
                best_witness = tuple(seq)
        if t == max_depth:
            return
        for nxt in succ[seq[-1]]:
            if nxt < seq[0]:
                continue  # no completion could be a minimal rotation
            if mults >= budget:
                truncated = True
                return
            mults += 1
            seq.append(nxt)
            visit(seq, mats[nxt] @ prod)
            seq.pop()
            if truncated:
                return

    for root in range(n):
        if truncated:
            break
        visit([root], mats[root])

    witness = (
        tuple(sys.states[i] for i in best_witness) if best_witness is not None else None
    )
    return SpectralBound(
        method="cjsr_lower" if constrained else "jsr_lower",
        value=best,
        depth_or_degree=max_depth,
        witness=witness,
        truncated=truncated,
    )


def jsr_upper_bound_norm(
    sys: RegimeSystem,
    max_depth: int,
    constrained: bool = False,
    budget: int = DEFAULT_PRODUCT_BUDGET,
) -> SpectralBound:
    """Best operator-norm upper bound over depths 1..max_depth.

    For each t the maximum of ||F[i_t] ... F[i_1]||_2^(1/t) over (admissible)
    length-t sequences bounds the growth rate from above; the reported value
    minimizes over t.  Unlike the lower bound, every sequence is evaluated:
    norms are not invariant under rotation and no cycle closure is needed.
    A depth level only counts once fully enumerated, so the enumeration
    depth is capped up front at what the multiplication budget allows.
    """
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    mats = [sys.companion[s] for s in sys.states]
    succ = _successors(sys, constrained)
    n = len(mats)

    # sequences of length t ending in each state; tree edges at level t cost
    # one multiplication per sequence
    counts = np.ones(n, dtype=float)
    depth_cap = 1
    spent = 0.0
    for t in range(2, max_depth + 1):
        nxt_counts = np.zeros(n, dtype=float)
        for i in range(n):
            for j in succ[i]:
                nxt_counts[j] += counts[i]
        if spent + nxt_counts.sum() > budget:
            break
        spent += nxt_counts.sum()
        counts = nxt_counts
        depth_cap = t
    truncated = depth_cap < max_depth

    depth_max = [0.0] * (depth_cap + 1)
    depth_arg: list[tuple[int, ...] | None] = [None] * (depth_cap + 1)

    def visit(seq: list[int], prod: np.ndarray):
        t = len(seq)
        nrm = float(np.linalg.norm(prod, 2))
        if nrm > depth_max[t]:
            depth_max[t] = nrm
            depth_arg[t] = tuple(seq)
        if t == depth_cap:
            return
        for nxt in succ[seq[-1]]:
            seq.append(nxt)
            visit(seq, mats[nxt] @ prod)
            seq.pop()

    for root in range(n):
        visit([root], mats[root])

    best_t = 1
    best = float("inf")
    for t in range(1, depth_cap + 1):
        value = depth_max[t] ** (1.0 / t)
        if value < best:
            best = value
            best_t = t
    witness = (
        tuple(sys.states[i] for i in depth_arg[best_t])
        if depth_arg[best_t] is not None
        else None
    )
    return SpectralBound(
        method="cjsr_upper_norm" if constrained else "jsr_upper_norm",
        value=best,
        depth_or_degree=max_depth,
        witness=witness,
        truncated=truncated,
    )
