"""Censored/kinked structural VAR models and their switched-linear reduction.

A model in p variables singles out one series y_t that enters with different
coefficients above and below a threshold b, while the remaining p-1 series
x_t enter linearly.  This module represents such models, checks coherency
(unique solvability), shifts the threshold to zero, reduces coherent models
to a canonical form in which all nonlinearity sits in the lags, and builds
the cone-partitioned switched linear system that governs the deterministic
part of the dynamics.

Sign convention used everywhere: y = 0 belongs to the "+" regime, i.e. the
regime indicator of a lag is '+' exactly when the lagged y is >= the
threshold.  Pattern strings such as "+-" list the most recent lag first.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "CoherenceError",
    "CksvarModel",
    "CoherenceReport",
    "CanonicalModel",
    "RegimeSystem",
    "MonetaryModelSpec",
    "check_coherence",
    "shift_threshold",
    "canonicalize",
    "build_regime_system",
    "build_monetary",
    "model_from_dict",
    "model_to_dict",
    "load_model",
    "save_model",
    "canonical_to_dict",
]

_DET_RTOL = 1e-12


class CoherenceError(ValueError):
    """Raised when a model has no unique solution or cannot be normalized."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _sign_pattern(k: int) -> list[str]:
    """All regime labels of length k, all-'+' first."""
    return ["".join(s) for s in itertools.product("+-", repeat=k)]


@dataclass(frozen=True)
class CksvarModel:
    """Structural model with threshold variable y and linear block x.

    Parameters are the contemporaneous blocks (phi0_plus, phi0_minus columns
    for y+ and y-, and the p x (p-1) matrix phi0_x for x), k lags of the
    same shapes, an intercept, the threshold b, and an innovation covariance
    used only by simulation.
    """

    p: int
    k: int
    b: float
    phi0_plus: np.ndarray
    phi0_minus: np.ndarray
    phi0_x: np.ndarray
    lag_plus: tuple[np.ndarray, ...]
    lag_minus: tuple[np.ndarray, ...]
    lag_x: tuple[np.ndarray, ...]
    c: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        p, k = self.p, self.k
        if p < 1 or k < 1:
            raise ValueError(f"need p >= 1 and k >= 1, got p={p}, k={k}")
        object.__setattr__(self, "b", float(self.b))

        def vec(name, v):
            v = _readonly(v)
            if v.shape != (p,):
                raise ValueError(f"{name} must have shape ({p},), got {v.shape}")
            return v

        def xmat(name, m):
            m = _readonly(m)
            if m.shape != (p, p - 1):
                raise ValueError(f"{name} must have shape ({p}, {p - 1}), got {m.shape}")
            return m

        object.__setattr__(self, "phi0_plus", vec("phi0_plus", self.phi0_plus))
        object.__setattr__(self, "phi0_minus", vec("phi0_minus", self.phi0_minus))
        object.__setattr__(self, "phi0_x", xmat("phi0_x", self.phi0_x))
        for name in ("lag_plus", "lag_minus", "lag_x"):
            seq = tuple(getattr(self, name))
            if len(seq) != k:
                raise ValueError(f"{name} must contain k={k} entries, got {len(seq)}")
            conv = vec if name != "lag_x" else xmat
            seq = tuple(conv(f"{name}[{i}]", m) for i, m in enumerate(seq))
            object.__setattr__(self, name, seq)
        object.__setattr__(self, "c", vec("c", self.c))
        sigma = _readonly(self.sigma)
        if sigma.shape != (p, p):
            raise ValueError(f"sigma must have shape ({p}, {p}), got {sigma.shape}")
        if not np.allclose(sigma, sigma.T, atol=1e-10):
            raise ValueError("sigma must be symmetric")
        object.__setattr__(self, "sigma", sigma)

    # -- contemporaneous blocks ------------------------------------------

    @property
    def phi0(self) -> np.ndarray:
        """Full p x (p+1) contemporaneous matrix [phi0_plus phi0_minus phi0_x]."""
        return np.column_stack([self.phi0_plus, self.phi0_minus, self.phi0_x])

    def phi0_regime(self, sign: str) -> np.ndarray:
        """p x p matrix applying when y is in the given regime ('+' or '-')."""
        col = self.phi0_plus if sign == "+" else self.phi0_minus
        return np.column_stack([col, self.phi0_x])

    @property
    def phi0_xx(self) -> np.ndarray:
        return self.phi0_x[1:, :]

    @property
    def phi0_yx(self) -> np.ndarray:
        return self.phi0_x[0, :]

    def lag_matrix(self, i: int) -> np.ndarray:
        """p x (p+1) lag matrix [lag_plus[i] lag_minus[i] lag_x[i]]."""
        return np.column_stack([self.lag_plus[i], self.lag_minus[i], self.lag_x[i]])

    def is_linear(self, atol: float = 0.0) -> bool:
        """True when the + and - coefficients agree at every lag and at lag 0."""
        if not np.allclose(self.phi0_plus, self.phi0_minus, atol=atol):
            return False
        return all(
            np.allclose(a, b, atol=atol)
            for a, b in zip(self.lag_plus, self.lag_minus)
        )


@dataclass(frozen=True)
class CoherenceReport:
    """Result of the unique-solvability check.

    det_plus / det_minus are the determinants of the two contemporaneous
    regime matrices; the model is coherent when they share a strict sign.
    `normalized` additionally requires an invertible x-block and positive
    partialled-out y coefficients.  row_order and y_sign record the equation
    reordering and sign flip applied during normalization (identity for a
    plain check).
    """

    det_plus: float
    det_minus: float
    coherent: bool
    normalized: bool
    row_order: tuple[int, ...]
    y_sign: float = 1.0


def _det_tol(phi0: np.ndarray, p: int) -> float:
    scale = max(1.0, float(np.linalg.norm(phi0)))
    return _DET_RTOL * scale**p


def _schur_pair(model: CksvarModel) -> tuple[float, float] | None:
    """Partialled-out y coefficients (phibar+, phibar-), or None if the
    x-block is numerically singular."""
    p = model.p
    if p == 1:
        return float(model.phi0_plus[0]), float(model.phi0_minus[0])
    xx = model.phi0_xx
    if abs(np.linalg.det(xx)) <= _det_tol(model.phi0, p - 1):
        return None
    sol = np.linalg.solve(xx, np.column_stack([model.phi0_plus[1:], model.phi0_minus[1:]]))
    yx = model.phi0_yx
    return (
        float(model.phi0_plus[0] - yx @ sol[:, 0]),
        float(model.phi0_minus[0] - yx @ sol[:, 1]),
    )


def check_coherence(model: CksvarModel) -> CoherenceReport:
    """Check unique solvability of the contemporaneous system.

    Coherent means sgn(det[phi0+ phi0_x]) = sgn(det[phi0- phi0_x]) != 0;
    normalized additionally means the x-block is invertible and both
    partialled-out y coefficients are strictly positive.
    """
    phi0 = model.phi0
    if not np.all(np.isfinite(phi0)):
        raise ValueError("contemporaneous coefficients contain non-finite entries")
    det_plus = float(np.linalg.det(model.phi0_regime("+")))
    det_minus = float(np.linalg.det(model.phi0_regime("-")))
    tol = _det_tol(phi0, model.p)
    coherent = (
        abs(det_plus) > tol
        and abs(det_minus) > tol
        and math.copysign(1.0, det_plus) == math.copysign(1.0, det_minus)
    )
    schur = _schur_pair(model)
    normalized = coherent and schur is not None and schur[0] > 0 and schur[1] > 0
    return CoherenceReport(
        det_plus=det_plus,
        det_minus=det_minus,
        coherent=coherent,
        normalized=normalized,
        row_order=tuple(range(model.p)),
    )


def _reorder_rows(model: CksvarModel, order: tuple[int, ...], y_sign: float) -> CksvarModel:
    """Reorder the equations and flip the first one; the solution process is
    unchanged (rows of all coefficient blocks, the intercept, and the shock
    covariance transform together)."""
    idx = list(order)
    s = np.ones(model.p)
    s[0] = y_sign

    def rows_v(v):
        return s * v[idx]

    def rows_m(m):
        return s[:, None] * m[idx, :]

    sigma = model.sigma[np.ix_(idx, idx)]
    sigma = (s[:, None] * sigma) * s[None, :]
    return CksvarModel(
        p=model.p,
        k=model.k,
        b=model.b,
        phi0_plus=rows_v(model.phi0_plus),
        phi0_minus=rows_v(model.phi0_minus),
        phi0_x=rows_m(model.phi0_x),
        lag_plus=tuple(rows_v(v) for v in model.lag_plus),
        lag_minus=tuple(rows_v(v) for v in model.lag_minus),
        lag_x=tuple(rows_m(m) for m in model.lag_x),
        c=rows_v(model.c),
        sigma=sigma,
    )


def _normalize_rows(model: CksvarModel) -> tuple[CksvarModel, tuple[int, ...], float]:
    """Find the first equation ordering (lexicographic) with an invertible
    x-block, flipping the y-equation if needed so both partialled-out y
    coefficients come out positive."""
    report = check_coherence(model)
    if not report.coherent:
        raise CoherenceError(
            "model is incoherent: the two contemporaneous regime matrices "
            f"have determinants {report.det_plus:.6g} and {report.det_minus:.6g}"
        )
    for order in itertools.permutations(range(model.p)):
        cand = model if order == tuple(range(model.p)) else _reorder_rows(model, order, 1.0)
        schur = _schur_pair(cand)
        if schur is None:
            continue
        sp, sm = schur
        if sp > 0 and sm > 0:
            return cand, tuple(order), 1.0
        if sp < 0 and sm < 0:
            return _reorder_rows(cand, tuple(range(model.p)), -1.0), tuple(order), -1.0
        # opposite signs cannot occur for a coherent model with invertible
        # x-block; treat as numerically degenerate and keep searching
    raise CoherenceError("no equation ordering yields an invertible x-block")


def shift_threshold(model: CksvarModel) -> CksvarModel:
    """Return an equivalent model with threshold zero.

    The intercept absorbs the shift: c_b = c - [phi+(1) + phi-(1)] * b with
    phi(1) the lag polynomial evaluated at one.  Trajectories of the result
    equal the original trajectories with b subtracted from y.
    """
    if model.b == 0.0:
        return model
    phi1_plus = model.phi0_plus - sum(model.lag_plus)
    phi1_minus = model.phi0_minus - sum(model.lag_minus)
    c_b = model.c - (phi1_plus + phi1_minus) * model.b
    return CksvarModel(
        p=model.p,
        k=model.k,
        b=0.0,
        phi0_plus=model.phi0_plus,
        phi0_minus=model.phi0_minus,
        phi0_x=model.phi0_x,
        lag_plus=model.lag_plus,
        lag_minus=model.lag_minus,
        lag_x=model.lag_x,
        c=c_b,
        sigma=model.sigma,
    )


@dataclass(frozen=True)
class CanonicalModel:
    """Reduced model whose contemporaneous matrix is [[1,1,0],[0,0,I]].

    All nonlinearity sits in the lag coefficients.  transform_P maps the
    canonical (y+, y-, x) stack back to the source stack; transform_Q maps
    source shocks and intercept to canonical ones (it includes any equation
    reordering and sign flip applied during normalization, recorded in
    `coherence`).
    """

    p: int
    k: int
    lag_plus: tuple[np.ndarray, ...]
    lag_minus: tuple[np.ndarray, ...]
    lag_x: tuple[np.ndarray, ...]
    intercept: np.ndarray
    transform_P: np.ndarray
    transform_Q: np.ndarray
    sigma_tilde: np.ndarray
    phibar_plus: float
    phibar_minus: float
    coherence: CoherenceReport
    partially_observed: bool = False

    def __post_init__(self):
        for name in ("intercept", "transform_P", "transform_Q", "sigma_tilde"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))
        for name in ("lag_plus", "lag_minus", "lag_x"):
            object.__setattr__(
                self, name, tuple(_readonly(m) for m in getattr(self, name))
            )

    def lag_matrix(self, i: int) -> np.ndarray:
        return np.column_stack([self.lag_plus[i], self.lag_minus[i], self.lag_x[i]])

    def lag_regime(self, i: int, sign: str) -> np.ndarray:
        """p x p matrix of lag i applying when the lagged y is in `sign`."""
        col = self.lag_plus[i] if sign == "+" else self.lag_minus[i]
        return np.column_stack([col, self.lag_x[i]])

    def as_cksvar(self) -> CksvarModel:
        """View the canonical model as a plain model (threshold zero)."""
        p = self.p
        e1 = np.zeros(p)
        e1[0] = 1.0
        phi0_x = np.zeros((p, p - 1))
        if p > 1:
            phi0_x[1:, :] = np.eye(p - 1)
        return CksvarModel(
            p=p,
            k=self.k,
            b=0.0,
            phi0_plus=e1,
            phi0_minus=e1,
            phi0_x=phi0_x,
            lag_plus=self.lag_plus,
            lag_minus=self.lag_minus,
            lag_x=self.lag_x,
            c=self.intercept,
            sigma=self.sigma_tilde,
        )

    def is_linear(self, atol: float = 0.0) -> bool:
        return all(
            np.allclose(a, b, atol=atol)
            for a, b in zip(self.lag_plus, self.lag_minus)
        )


def canonicalize(model: CksvarModel, partially_observed: bool = False) -> CanonicalModel:
    """Reduce a coherent model to canonical form.

    Internally reorders equations (lexicographic-first search) and flips the
    y-equation sign if needed so the x-block is invertible and the
    partialled-out y coefficients are positive; the applied permutation and
    sign are reported on the returned model's `coherence`.  With
    `partially_observed` the system is first rescaled so both partialled-out
    coefficients equal one, which makes the canonical y identical to the
    observed y.  A nonzero threshold is shifted away first.
    """
    model = shift_threshold(model)
    work, order, y_sign = _normalize_rows(model)

    equation_scale = 1.0
    if partially_observed:
        sp, _ = _schur_pair(work)
        equation_scale = 1.0 / sp
        work = _scale_system(work, equation_scale)
        _, sm = _schur_pair(work)
        work = _scale_minus_column(work, 1.0 / sm)

    p, k = work.p, work.k
    sp, sm = _schur_pair(work)
    xx = work.phi0_xx
    yx = work.phi0_yx

    # Q = [[1, -yx xx^{-1}], [0, I]]; P is the explicit block inverse of
    # [[sp,0,0],[0,sm,0],[xy+, xy-, xx]]
    Q = np.eye(p)
    if p > 1:
        Q[0, 1:] = -np.linalg.solve(xx.T, yx)
    P = np.zeros((p + 1, p + 1))
    P[0, 0] = 1.0 / sp
    P[1, 1] = 1.0 / sm
    if p > 1:
        xx_inv = np.linalg.inv(xx)
        P[2:, 0] = -xx_inv @ work.phi0_plus[1:] / sp
        P[2:, 1] = -xx_inv @ work.phi0_minus[1:] / sm
        P[2:, 2:] = xx_inv

    lag_plus, lag_minus, lag_x = [], [], []
    for i in range(k):
        tilde = Q @ work.lag_matrix(i) @ P
        lag_plus.append(tilde[:, 0])
        lag_minus.append(tilde[:, 1])
        lag_x.append(tilde[:, 2:])

    perm = np.zeros((p, p))
    perm[np.arange(p), list(order)] = 1.0
    sign = np.eye(p)
    sign[0, 0] = y_sign
    q_total = equation_scale * (Q @ sign @ perm)

    report = check_coherence(model)
    report = CoherenceReport(
        det_plus=report.det_plus,
        det_minus=report.det_minus,
        coherent=report.coherent,
        normalized=report.normalized,
        row_order=order,
        y_sign=y_sign,
    )
    return CanonicalModel(
        p=p,
        k=k,
        lag_plus=tuple(lag_plus),
        lag_minus=tuple(lag_minus),
        lag_x=tuple(lag_x),
        intercept=Q @ work.c,
        transform_P=P,
        transform_Q=q_total,
        sigma_tilde=Q @ work.sigma @ Q.T,
        phibar_plus=sp,
        phibar_minus=sm,
        coherence=report,
        partially_observed=partially_observed,
    )


def _scale_system(model: CksvarModel, factor: float) -> CksvarModel:
    """Multiply every equation by `factor` (shock covariance by factor^2)."""
    return CksvarModel(
        p=model.p,
        k=model.k,
        b=model.b,
        phi0_plus=factor * model.phi0_plus,
        phi0_minus=factor * model.phi0_minus,
        phi0_x=factor * model.phi0_x,
        lag_plus=tuple(factor * v for v in model.lag_plus),
        lag_minus=tuple(factor * v for v in model.lag_minus),
        lag_x=tuple(factor * m for m in model.lag_x),
        c=factor * model.c,
        sigma=factor**2 * model.sigma,
    )


def _scale_minus_column(model: CksvarModel, factor: float) -> CksvarModel:
    """Rescale the unobserved y- trajectory (its coefficients scale inversely)."""
    return CksvarModel(
        p=model.p,
        k=model.k,
        b=model.b,
        phi0_plus=model.phi0_plus,
        phi0_minus=factor * model.phi0_minus,
        phi0_x=model.phi0_x,
        lag_plus=model.lag_plus,
        lag_minus=tuple(factor * v for v in model.lag_minus),
        lag_x=model.lag_x,
        c=model.c,
        sigma=model.sigma,
    )


@dataclass(frozen=True)
class RegimeSystem:
    """Cone-partitioned switched linear system in companion form.

    There is one state per sign pattern of the k lagged y values ('+' means
    >= 0, most recent lag first).  companion[s] is the d x d matrix applying
    in state s (d = k*p); cones[s] is the k x d matrix with closure(W_s) =
    {z : cones[s] @ z >= 0}; edges lists the transitions permitted by the
    pattern shift; pair_cones[(i, j)] stacks cones[i] on cones[j] @ F[i] and
    cuts out the set mapped from W_i into W_j.
    """

    p: int
    k: int
    d: int
    states: tuple[str, ...]
    companion: dict[str, np.ndarray]
    cones: dict[str, np.ndarray]
    edges: tuple[tuple[str, str], ...]
    pair_cones: dict[tuple[str, str], np.ndarray]

    def self_admissible(self) -> tuple[str, ...]:
        """States whose constant sequence is admissible ((s, s) in edges)."""
        edge_set = set(self.edges)
        return tuple(s for s in self.states if (s, s) in edge_set)


def build_regime_system(cm: CanonicalModel) -> RegimeSystem:
    """Enumerate the 2^k regimes of a canonical model.

    The companion matrix of state s stacks [Phi_1(s_1) ... Phi_k(s_k)] on
    top of shifted identity blocks, where Phi_i(s_i) picks the + or - column
    of lag i according to the pattern.
    """
    p, k = cm.p, cm.k
    d = k * p
    states = tuple(_sign_pattern(k))
    companion: dict[str, np.ndarray] = {}
    cones: dict[str, np.ndarray] = {}
    for s in states:
        F = np.zeros((d, d))
        for i, sign in enumerate(s):
            F[:p, i * p : (i + 1) * p] = cm.lag_regime(i, sign)
        if k > 1:
            F[p:, : d - p] = np.eye(d - p)
        E = np.zeros((k, d))
        for j, sign in enumerate(s):
            E[j, j * p] = 1.0 if sign == "+" else -1.0
        companion[s] = _readonly(F)
        cones[s] = _readonly(E)
    edges = tuple((s, s0 + s[:-1]) for s in states for s0 in "+-")
    pair_cones = {
        (i, j): _readonly(np.vstack([cones[i], cones[j] @ companion[i]]))
        for (i, j) in edges
    }
    return RegimeSystem(
        p=p,
        k=k,
        d=d,
        states=states,
        companion=companion,
        cones=cones,
        edges=edges,
        pair_cones=pair_cones,
    )


@dataclass(frozen=True)
class MonetaryModelSpec:
    """Parameters of the stylized policy-rate model with a lower bound.

    chi is inflation persistence, theta (< 0) the slope linking the policy
    stance to inflation, gamma_tr (> 0) the rule's response to inflation,
    mu in [0, 1] the relative efficacy of the unconstrained instrument,
    psi in (-1, 1) the persistence of the natural rate, and pi_bar / r_bar
    the inflation target and mean natural rate.
    """

    chi: float
    theta: float
    gamma_tr: float
    mu: float
    psi: float
    pi_bar: float = 0.0
    r_bar: float = 0.0

    def __post_init__(self):
        if not self.gamma_tr > 0:
            raise ValueError(f"gamma_tr must be > 0, got {self.gamma_tr}")
        if not self.theta < 0:
            raise ValueError(f"theta must be < 0, got {self.theta}")
        if not 0.0 <= self.chi < 1.0:
            raise ValueError(f"chi must lie in [0, 1), got {self.chi}")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu must lie in [0, 1], got {self.mu}")
        if not -1.0 < self.psi < 1.0:
            raise ValueError(f"psi must lie in (-1, 1), got {self.psi}")

    @property
    def kappa_1(self) -> float:
        return 1.0 / (1.0 - self.theta * self.gamma_tr)

    @property
    def kappa_mu(self) -> float:
        return 1.0 / (1.0 - self.mu * self.theta * self.gamma_tr)

    @property
    def tau_mu(self) -> float:
        return self.gamma_tr * self.theta * (1.0 - self.mu) * self.kappa_1

    @property
    def i_bar(self) -> float:
        return self.r_bar + self.pi_bar


def build_monetary(spec: MonetaryModelSpec) -> CksvarModel:
    """Assemble the two-variable model (policy rate, inflation) with one lag."""
    chi, theta, gam = spec.chi, spec.theta, spec.gamma_tr
    mu, psi = spec.mu, spec.psi
    c = np.array(
        [
            (1.0 - psi) * (spec.i_bar - gam * spec.pi_bar),
            (1.0 - theta * gam - chi) * spec.pi_bar,
        ]
    )
    return CksvarModel(
        p=2,
        k=1,
        b=0.0,
        phi0_plus=np.array([1.0, 0.0]),
        phi0_minus=np.array([1.0, theta * (1.0 - mu)]),
        phi0_x=np.array([[-gam], [1.0 - theta * gam]]),
        lag_plus=(np.array([psi, 0.0]),),
        lag_minus=(np.array([psi, 0.0]),),
        lag_x=(np.array([[-psi * gam], [chi]]),),
        c=c,
        sigma=np.eye(2),
    )


# ---------------------------------------------------------------------------
# model files


def model_from_dict(data: dict) -> CksvarModel:
    """Build a model from the JSON schema.

    An optional "monetary" sub-object {chi, theta, gamma, mu, psi, pi_bar,
    r_bar} overrides the raw coefficient blocks entirely.
    """
    if "monetary" in data:
        mon = data["monetary"]
        for key in ("chi", "theta", "gamma", "mu", "psi"):
            if key not in mon:
                raise ValueError(f"model file missing required key 'monetary.{key}'")
        spec = MonetaryModelSpec(
            chi=float(mon["chi"]),
            theta=float(mon["theta"]),
            gamma_tr=float(mon["gamma"]),
            mu=float(mon["mu"]),
            psi=float(mon["psi"]),
            pi_bar=float(mon.get("pi_bar", 0.0)),
            r_bar=float(mon.get("r_bar", 0.0)),
        )
        model = build_monetary(spec)
        if "sigma" in data:
            model = CksvarModel(
                p=model.p, k=model.k, b=model.b,
                phi0_plus=model.phi0_plus, phi0_minus=model.phi0_minus,
                phi0_x=model.phi0_x, lag_plus=model.lag_plus,
                lag_minus=model.lag_minus, lag_x=model.lag_x, c=model.c,
                sigma=np.asarray(data["sigma"], dtype=float),
            )
        return model

    required = ("p", "k", "b", "phi0_plus", "phi0_minus", "phi0_x",
                "lag_plus", "lag_minus", "lag_x", "c", "sigma")
    for key in required:
        if key not in data:
            raise ValueError(f"model file missing required key '{key}'")
    p, k = int(data["p"]), int(data["k"])
    try:
        return CksvarModel(
            p=p,
            k=k,
            b=float(data["b"]),
            phi0_plus=np.asarray(data["phi0_plus"], dtype=float),
            phi0_minus=np.asarray(data["phi0_minus"], dtype=float),
            phi0_x=np.asarray(data["phi0_x"], dtype=float).reshape(p, p - 1),
            lag_plus=tuple(np.asarray(v, dtype=float) for v in data["lag_plus"]),
            lag_minus=tuple(np.asarray(v, dtype=float) for v in data["lag_minus"]),
            lag_x=tuple(
                np.asarray(m, dtype=float).reshape(p, p - 1) for m in data["lag_x"]
            ),
            c=np.asarray(data["c"], dtype=float),
            sigma=np.asarray(data["sigma"], dtype=float),
        )
    except (TypeError, ValueError) as exc:
        raise ValueError(f"invalid model file: {exc}") from exc


def model_to_dict(model: CksvarModel) -> dict:
    return {
        "p": model.p,
        "k": model.k,
        "b": model.b,
        "phi0_plus": model.phi0_plus.tolist(),
        "phi0_minus": model.phi0_minus.tolist(),
        "phi0_x": model.phi0_x.tolist(),
        "lag_plus": [v.tolist() for v in model.lag_plus],
        "lag_minus": [v.tolist() for v in model.lag_minus],
        "lag_x": [m.tolist() for m in model.lag_x],
        "c": model.c.tolist(),
        "sigma": model.sigma.tolist(),
    }


def canonical_to_dict(cm: CanonicalModel) -> dict:
    """Canonical model in the model-file schema plus its transform blocks."""
    out = model_to_dict(cm.as_cksvar())
    out["transform_P"] = cm.transform_P.tolist()
    out["transform_Q"] = cm.transform_Q.tolist()
    out["phibar_plus"] = cm.phibar_plus
    out["phibar_minus"] = cm.phibar_minus
    out["row_order"] = list(cm.coherence.row_order)
    out["y_sign"] = cm.coherence.y_sign
    return out


def load_model(path: str | Path) -> CksvarModel:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError("model file must contain a JSON object")
    return model_from_dict(data)


def save_model(model: CksvarModel, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")
