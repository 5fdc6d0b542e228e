"""Stochastic simulation, deterministic skeleton, and the combined verdict.

Simulation draws shocks, runs the exact canonical-form recurrence (the
canonical representation makes the within-period system triangular, so no
per-period equation solving is needed), and maps the result back to the
source coordinates.  The skeleton drops intercept and shocks; its sampled
contraction behaviour complements the certified bounds.  The verdict runs
the bound hierarchy and classifies the model as certified ergodic,
explosive, or inconclusive.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import norm as _gaussian
from scipy.stats import qmc

from .model import (
    CanonicalModel,
    CksvarModel,
    RegimeSystem,
    build_regime_system,
    canonicalize,
    shift_threshold,
)
from .lyapunov import LyapunovCertificate, bound_by_bisection
from .spectral import SpectralBound, jsr_lower_bound, jsr_upper_bound_norm

__all__ = [
    "Trajectory",
    "StabilityScanReport",
    "VerdictOptions",
    "Verdict",
    "sigma_sqrt",
    "simulate_cksvar",
    "simulate_skeleton",
    "skeleton_stability_scan",
    "ergodicity_verdict",
    "trajectory_to_csv",
]

# floating guard around the unit circle when reading a product lower bound
# as evidence of instability
_EXPLOSIVE_GUARD = 1e-9


@dataclass(frozen=True)
class Trajectory:
    """Simulated path of (y, x) with regime bookkeeping.

    values has one row per period; regimes[t] is the sign pattern of the k
    most recent y values at period t (most recent first, '+' meaning on or
    above the threshold).  shocks holds the drawn innovations in source
    coordinates when the simulator generated them.
    """

    horizon: int
    values: np.ndarray
    regimes: tuple[str, ...]
    seed: int | None
    shocks: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.shocks is not None:
            s = np.asarray(self.shocks, dtype=float)
            s.setflags(write=False)
            object.__setattr__(self, "shocks", s)

    @property
    def y(self) -> np.ndarray:
        return self.values[:, 0]

    @property
    def x(self) -> np.ndarray:
        return self.values[:, 1:]

    def max_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.values, axis=1)))


def sigma_sqrt(sigma: np.ndarray) -> np.ndarray:
    """Symmetric square root by eigendecomposition.

    Eigenvalues below -1e-12 (relative) are rejected; small negative ones
    are clamped to zero so semidefinite inputs round-trip deterministically.
    """
    sigma = np.asarray(sigma, dtype=float)
    vals, vecs = np.linalg.eigh((sigma + sigma.T) / 2.0)
    scale = max(1.0, float(vals[-1]))
    if vals[0] < -1e-12 * scale:
        raise ValueError(f"sigma is not positive semidefinite (eigenvalue {vals[0]:.3g})")
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


def _pattern(recent_y: list[float]) -> str:
    """Sign pattern of the most recent k y-values (most recent first)."""
    return "".join("+" if v >= 0.0 else "-" for v in recent_y)


def simulate_cksvar(
    model: CksvarModel,
    T: int,
    seed: int | None = None,
    init: np.ndarray | None = None,
    shocks: np.ndarray | None = None,
    sigma_fn=None,
) -> Trajectory:
    """Simulate T periods of a coherent model.

    Shocks are sigma^(1/2) times standard Gaussian draws from a seeded
    generator; pass `shocks` (T x p, source coordinates) to drive the
    recurrence with externally supplied innovations instead, or `sigma_fn`
    (flattened lag stack, most recent first -> covariance matrix) for
    state-dependent volatility.  `init` holds the k pre-sample (y, x) rows,
    oldest first, in source coordinates; it defaults to zeros.  The regime
    labels use the convention that y equal to the threshold counts as '+'.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    p, k = model.p, model.k
    if shocks is None and seed is None:
        raise ValueError("a seed is required when shocks are not supplied")
    if init is None:
        init = np.zeros((k, p))
    init = np.asarray(init, dtype=float)
    if init.shape != (k, p):
        raise ValueError(f"init must have shape ({k}, {p}), got {init.shape}")

    b = model.b
    shifted = shift_threshold(model)
    cm = canonicalize(shifted)

    if shocks is not None:
        u = np.asarray(shocks, dtype=float)
        if u.shape != (T, p):
            raise ValueError(f"shocks must have shape ({T}, {p}), got {u.shape}")
        eps = None
    else:
        rng = np.random.default_rng(seed)
        eps = rng.standard_normal((T, p))
        if sigma_fn is None:
            u = eps @ sigma_sqrt(model.sigma).T
        else:
            u = np.empty((T, p))  # filled per step from the lag state

    Q = cm.transform_Q
    P = cm.transform_P

    # pre-sample lags in canonical coordinates (threshold already removed)
    init_shift = init.copy()
    init_shift[:, 0] -= b
    lags_y: list[float] = []
    lags_stack: list[np.ndarray] = []
    lags_src: list[np.ndarray] = []
    for row in init_shift[::-1]:  # most recent first
        y = float(row[0])
        stack = np.concatenate([[max(y, 0.0), min(y, 0.0)], row[1:]])
        canon = np.linalg.solve(P, stack)
        lags_y.append(canon[0] + canon[1])
        lags_stack.append(canon)
        lags_src.append(row)

    values = np.empty((T, p))
    regimes: list[str] = []
    recent_y = [float(r[0]) for r in init_shift[::-1]]

    for t in range(T):
        if sigma_fn is not None and shocks is None:
            state = np.concatenate(lags_src)
            u[t] = sigma_sqrt(sigma_fn(state)) @ eps[t]
        z = cm.intercept + Q @ u[t]
        for i in range(k):
            z = z + cm.lag_regime(i, "+" if lags_y[i] >= 0.0 else "-") @ np.concatenate(
                [[lags_y[i]], lags_stack[i][2:]]
            )
        y_t = float(z[0])
        stack = np.concatenate([[max(y_t, 0.0), min(y_t, 0.0)], z[1:]])
        src = P @ stack
        y_src = src[0] + src[1]
        row = np.concatenate([[y_src], src[2:]])

        lags_y.insert(0, y_t)
        lags_y.pop()
        lags_stack.insert(0, stack)
        lags_stack.pop()
        lags_src.insert(0, row)
        lags_src.pop()

        recent_y.insert(0, y_src)
        recent_y.pop()
        regimes.append(_pattern(recent_y))

        values[t, 0] = y_src + b
        values[t, 1:] = row[1:]

    return Trajectory(
        horizon=T,
        values=values,
        regimes=tuple(regimes),
        seed=seed if shocks is None else None,
        shocks=u,
    )


def simulate_skeleton(cm: CanonicalModel, init: np.ndarray, T: int) -> Trajectory:
    """Run the deterministic part of a canonical model: no intercept, no
    shocks.  The map is homogeneous of degree one in the initial block."""
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    p, k = cm.p, cm.k
    init = np.asarray(init, dtype=float)
    if init.shape != (k, p):
        raise ValueError(f"init must have shape ({k}, {p}), got {init.shape}")

    lags: list[np.ndarray] = [row.copy() for row in init[::-1]]  # most recent first
    values = np.empty((T, p))
    regimes: list[str] = []
    recent_y = [float(r[0]) for r in lags]

    for t in range(T):
        z = np.zeros(p)
        for i in range(k):
            y = lags[i][0]
            z = z + cm.lag_regime(i, "+" if y >= 0.0 else "-") @ lags[i]
        lags.insert(0, z)
        lags.pop()
        recent_y.insert(0, float(z[0]))
        recent_y.pop()
        regimes.append(_pattern(recent_y))
        values[t] = z

    return Trajectory(horizon=T, values=values, regimes=tuple(regimes), seed=None)


@dataclass(frozen=True)
class StabilityScanReport:
    """Sampled contraction summary for the companion-form skeleton.

    This is a heuristic screen, not a proof: it iterates the skeleton
    `steps` times from unit-sphere start points (a low-discrepancy set plus
    all signed axis points and one interior point per cone) and reports the
    worst terminal-to-initial norm ratio.  contracting requires the worst
    ratio to fall below the contraction target r; ratios above one count as
    divergence evidence.
    """

    grid_size: int
    steps: int
    contraction_ratio: float
    max_terminal_ratio: float
    verdict: str
    heuristic: bool = True


def _scan_points(sys: RegimeSystem, grid_size: int, seed: int) -> np.ndarray:
    d = sys.d
    sampler = qmc.Halton(d=d, scramble=True, seed=seed)
    raw = sampler.random(grid_size)
    gauss = _gaussian.ppf(np.clip(raw, 1e-12, 1.0 - 1e-12))
    pts = [gauss]
    eye = np.eye(d)
    pts.append(eye)
    pts.append(-eye)
    interior = []
    for s in sys.states:
        w = np.ones(d)
        for j, sign in enumerate(s):
            if sign == "-":
                w[j * sys.p] = -1.0
        interior.append(w)
    pts.append(np.array(interior))
    pts = np.vstack(pts)
    norms = np.linalg.norm(pts, axis=1)
    norms[norms == 0.0] = 1.0
    return pts / norms[:, None]


def skeleton_stability_scan(
    sys: RegimeSystem,
    grid_size: int = 512,
    M: int = 100,
    r: float = 0.5,
    seed: int = 0,
) -> StabilityScanReport:
    """Iterate the skeleton M steps from a deterministic point set and
    report the worst growth ratio.  Sample evidence only, never a proof."""
    if grid_size < 1 or M < 1:
        raise ValueError("grid_size and M must be >= 1")
    if not 0.0 < r < 1.0:
        raise ValueError(f"contraction ratio r must lie in (0, 1), got {r}")
    points = _scan_points(sys, grid_size, seed)
    worst = 0.0
    for w0 in points:
        w = w0.copy()
        for _ in range(M):
            pattern = "".join(
                "+" if w[j * sys.p] >= 0.0 else "-" for j in range(sys.k)
            )
            w = sys.companion[pattern] @ w
        worst = max(worst, float(np.linalg.norm(w)))
    if worst < r:
        verdict = "contracting"
    elif worst > 1.0:
        verdict = "diverging"
    else:
        verdict = "not_contracting_at_M"
    return StabilityScanReport(
        grid_size=grid_size,
        steps=M,
        contraction_ratio=r,
        max_terminal_ratio=worst,
        verdict=verdict,
    )


@dataclass(frozen=True)
class VerdictOptions:
    """Knobs for the bound pipeline behind the ergodicity verdict."""

    methods: tuple[str, ...] = ("jsr", "cjsr", "rjsr")
    degree: int = 2
    depth: int = 8
    tol: float = 1e-3
    budget: int | None = None


@dataclass(frozen=True)
class Verdict:
    """Classification with the bounds that produced it.

    ergodic_certified requires some certified upper bound strictly below
    1 - tol (the criteria are sufficient, so certification is one-sided);
    explosive_evidence requires an admissible product lower bound above
    one.  Anything else is inconclusive.
    """

    status: str
    evidence: tuple[SpectralBound, ...]
    certificates: dict[str, LyapunovCertificate] = field(default_factory=dict)
    tol: float = 1e-3

    @property
    def best_upper(self) -> float:
        uppers = [b.value for b in self.evidence if not b.method.endswith("lower")]
        return min(uppers) if uppers else float("inf")

    @property
    def lower(self) -> float:
        """Best admissible (constrained) product lower bound."""
        lowers = [b.value for b in self.evidence if b.method == "cjsr_lower"]
        return max(lowers) if lowers else 0.0


def classify_bounds(evidence, tol: float) -> str:
    """Verdict rules shared by the library pipeline and the CLI.

    Certified requires some upper bound strictly below 1 - tol; evidence of
    explosiveness requires an admissible (constrained) product lower bound
    above one, with a small floating guard -- the unconstrained lower bound
    only speaks to arbitrary switching and never condemns the model.  The
    criteria are sufficient only, so everything else is inconclusive.
    """
    lowers = [b.value for b in evidence if b is not None and b.method == "cjsr_lower"]
    uppers = [b.value for b in evidence if b is not None and not b.method.endswith("lower")]
    if uppers and min(uppers) < 1.0 - tol:
        return "ergodic_certified"
    if lowers and max(lowers) > 1.0 + _EXPLOSIVE_GUARD:
        return "explosive_evidence"
    return "inconclusive"


def ergodicity_verdict(model: CksvarModel, options: VerdictOptions | None = None) -> Verdict:
    """Run the bound hierarchy on a model and classify it.

    Arbitrary-switching bounds run first, then the transition-constrained
    program, then the cone-relaxed one; the pipeline stops as soon as one
    certified upper bound clears 1 - tol.  The constrained product lower
    bound supplies explosiveness evidence.  Inconclusive is a statement
    about these sufficient criteria, not about the model.
    """
    opts = options or VerdictOptions()
    cm = canonicalize(model)
    sys = build_regime_system(cm)

    evidence: list[SpectralBound] = []
    certificates: dict[str, LyapunovCertificate] = {}

    lower = jsr_lower_bound(sys, opts.depth, constrained=True)
    evidence.append(lower)

    for mode in ("jsr", "cjsr", "rjsr"):
        if mode not in opts.methods:
            continue
        if mode in ("jsr", "cjsr"):
            up = jsr_upper_bound_norm(sys, opts.depth, constrained=(mode == "cjsr"))
            evidence.append(up)
            if up.value < 1.0 - opts.tol:
                break
        bound, cert = bound_by_bisection(
            sys, mode, degree=opts.degree, tol=opts.tol, budget=opts.budget
        )
        evidence.append(bound)
        certificates[str(bound.witness)] = cert
        if bound.value < 1.0 - opts.tol:
            break

    return Verdict(
        status=classify_bounds(evidence, opts.tol),
        evidence=tuple(evidence),
        certificates=certificates,
        tol=opts.tol,
    )


def trajectory_to_csv(
    traj: Trajectory,
    path: str | Path | io.TextIOBase | None = None,
    include_shocks: bool = False,
) -> str | None:
    """Write a trajectory as CSV: t, y, x1..x{p-1}, regime[, u1..up]."""
    p = traj.values.shape[1]
    cols = ["t", "y"] + [f"x{i}" for i in range(1, p)] + ["regime"]
    if include_shocks:
        if traj.shocks is None:
            raise ValueError("trajectory carries no shocks to include")
        cols += [f"u{i}" for i in range(1, p + 1)]
    lines = [",".join(cols)]
    for t in range(traj.horizon):
        row = [str(t + 1)]
        row += [f"{v:.12g}" for v in traj.values[t]]
        row.append(traj.regimes[t])
        if include_shocks:
            row += [f"{v:.12g}" for v in traj.shocks[t]]
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if path is None:
        return text
    if isinstance(path, io.TextIOBase):
        path.write(text)
        return None
    with open(path, "w") as fh:
        fh.write(text)
    return None
