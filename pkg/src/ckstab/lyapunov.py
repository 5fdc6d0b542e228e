"""Certified upper bounds via Lyapunov feasibility programs.

Three nested programs bound the growth rate of a regime system by bisecting
over the contraction factor gamma of a semidefinite feasibility problem:

* jsr: one quadratic (or lifted-polynomial) form per state, decrease
  required across every ordered pair of states.  Valid for arbitrary
  switching.
* cjsr: decrease required only across transitions admitted by the system's
  edge set.
* rjsr: additionally relaxes both positivity and decrease to hold only on
  the cone each state occupies, through elementwise-nonnegative multiplier
  matrices on the cone generators.

Degrees above two replace each matrix by its action on a scaled monomial
basis (the m-lift), turning quadratic forms in the lifted space into
homogeneous polynomial forms of degree 2m; feasibility at gamma then
certifies a growth rate of gamma**(1/m).  All returned certificates are
re-checked by explicit eigenvalue computation; the solver is never trusted.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace

import cvxpy as cp
import numpy as np

from .model import RegimeSystem
from .spectral import SpectralBound, spectral_radius

__all__ = [
    "LmiProblem",
    "LmiResult",
    "LyapunovCertificate",
    "ValidationReport",
    "m_lift_vector",
    "m_lift_matrix",
    "lift_cone",
    "build_lmi_problem",
    "lmi_feasible",
    "bound_by_bisection",
    "validate_certificate",
    "certificate_to_dict",
    "solver_budget",
    "DEFAULT_SOLVER_BUDGET",
    "MODES",
]

MODES = ("jsr", "cjsr", "rjsr")
DEFAULT_SOLVER_BUDGET = 50_000
_BUDGET_ENV = "CKSTAB_SOLVER_BUDGET"
_MAX_BISECTIONS = 40


def solver_budget(budget: int | None = None) -> int:
    """Effective iteration budget: explicit argument, else environment
    override, else the default."""
    if budget is not None:
        return int(budget)
    env = os.environ.get(_BUDGET_ENV)
    return int(env) if env else DEFAULT_SOLVER_BUDGET


# ---------------------------------------------------------------------------
# scaled monomial lifts


def _exponents(d: int, m: int) -> list[tuple[int, ...]]:
    """Degree-m exponent vectors over d variables, first exponent largest
    first (so (m,0,...,0) leads)."""
    if d == 1:
        return [(m,)]
    out = []
    for e in range(m, -1, -1):
        for rest in _exponents(d - 1, m - e):
            out.append((e,) + rest)
    return out


def _basis_scales(exps: list[tuple[int, ...]], m: int) -> np.ndarray:
    fact = math.factorial
    scales = np.empty(len(exps))
    for r, a in enumerate(exps):
        c = fact(m)
        for e in a:
            c //= fact(e)
        scales[r] = math.sqrt(c)
    return scales


def lift_dimension(d: int, m: int) -> int:
    return math.comb(d + m - 1, m)


def m_lift_vector(w: np.ndarray, m: int) -> np.ndarray:
    """Scaled degree-m monomial vector of w, satisfying ||lift|| = ||w||**m.

    The entry for exponent vector a is sqrt(multinomial(m; a)) * prod w**a,
    in the basis order of `_exponents`.
    """
    if m < 1:
        raise ValueError(f"lift order must be >= 1, got {m}")
    w = np.asarray(w, dtype=float)
    exps = _exponents(w.size, m)
    scales = _basis_scales(exps, m)
    out = np.empty(len(exps))
    for r, a in enumerate(exps):
        v = 1.0
        for i, e in enumerate(a):
            if e:
                v *= w[i] ** e
        out[r] = v
    return scales * out


def _expand_form(rows: np.ndarray, powers: tuple[int, ...], d: int) -> dict:
    """Expand prod_i (rows[i] . w)**powers[i] into {exponent vector: coeff}."""
    poly = {tuple([0] * d): 1.0}
    for i, e in enumerate(powers):
        for _ in range(e):
            nxt: dict = {}
            row = rows[i]
            for b, cf in poly.items():
                for j in range(d):
                    if row[j] == 0.0:
                        continue
                    b2 = list(b)
                    b2[j] += 1
                    key = tuple(b2)
                    nxt[key] = nxt.get(key, 0.0) + cf * row[j]
            poly = nxt
    return poly


def m_lift_matrix(A: np.ndarray, m: int) -> np.ndarray:
    """The unique matrix carrying lifted vectors along A:
    m_lift_matrix(A, m) @ m_lift_vector(w, m) == m_lift_vector(A @ w, m).

    Row alpha expands prod_i (A[i] . w)**alpha_i in the scaled basis.
    """
    if m < 1:
        raise ValueError(f"lift order must be >= 1, got {m}")
    A = np.asarray(A, dtype=float)
    d = A.shape[0]
    exps = _exponents(d, m)
    scales = _basis_scales(exps, m)
    pos = {a: r for r, a in enumerate(exps)}
    out = np.zeros((len(exps), len(exps)))
    for r, a in enumerate(exps):
        for b, cf in _expand_form(A, a, d).items():
            out[r, pos[b]] += scales[r] * cf / scales[pos[b]]
    return out


def lift_cone(E: np.ndarray, m: int) -> np.ndarray:
    """Degree-m products of the cone's defining forms, in lifted coordinates.

    Rows are indexed by size-m multisets of rows of E; the row for multiset
    beta represents prod_{r in beta} (E[r] . w), so E @ w >= 0 implies
    lift_cone(E, m) @ m_lift_vector(w, m) >= 0 entrywise.
    """
    if m < 1:
        raise ValueError(f"lift order must be >= 1, got {m}")
    E = np.asarray(E, dtype=float)
    r, d = E.shape
    exps = _exponents(d, m)
    scales = _basis_scales(exps, m)
    pos = {a: i for i, a in enumerate(exps)}
    rows = []
    for beta in _exponents(r, m):
        row = np.zeros(len(exps))
        for b, cf in _expand_form(E, beta, d).items():
            row[pos[b]] += cf / scales[pos[b]]
        rows.append(row)
    return np.array(rows)


# ---------------------------------------------------------------------------
# feasibility problems


@dataclass(frozen=True)
class LmiProblem:
    """One gamma-indexed feasibility instance over lifted matrices.

    Feasibility of the constraint system

        P_i - E_i' U_i E_i           >= eps I     (positivity on the cone)
        g^2 P_i - A_i' P_j A_i - E_ij' U_ij E_ij >= eps I   for pairs (i, j)

    with g = gamma, U >= 0 elementwise (U present only in rjsr mode, pairs
    spanning all ordered pairs in jsr mode and the admissible edges
    otherwise) certifies a growth rate of gamma**(1/m) for degree 2m.
    """

    mode: str
    degree: int
    gamma: float
    eps: float
    states: tuple[str, ...]
    matrices: dict[str, np.ndarray]
    pairs: tuple[tuple[str, str], ...]
    state_cones: dict[str, np.ndarray] | None
    pair_cones: dict[tuple[str, str], np.ndarray] | None

    @property
    def m(self) -> int:
        return self.degree // 2

    @property
    def dim(self) -> int:
        return next(iter(self.matrices.values())).shape[0]

    def with_gamma(self, gamma: float) -> "LmiProblem":
        return replace(self, gamma=float(gamma))


@dataclass(frozen=True)
class LyapunovCertificate:
    """Checked certificate of a growth-rate bound.

    gamma_certified is on the growth-rate scale (already the (1/m)-th power
    of the lifted contraction factor).  P maps state labels to the lifted
    form matrices; multipliers, when present, maps 'state' and 'pair' to the
    nonnegative cone multipliers.  min_eigen_margin is the smallest
    eigenvalue over all certificate constraints, recomputed from the
    returned matrices.
    """

    gamma_certified: float
    degree: int
    mode: str
    P: dict[str, np.ndarray]
    multipliers: dict | None
    min_eigen_margin: float


@dataclass(frozen=True)
class LmiResult:
    """Outcome of one feasibility solve.

    status is 'feasible' (checked certificate attached), 'infeasible' (the
    solver produced an infeasibility certificate; not a disproof of the
    bound, only of this program), 'budget_exhausted', or 'not_proven'.
    """

    status: str
    certificate: LyapunovCertificate | None = None

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"


def _mode_pairs(sys: RegimeSystem, mode: str) -> tuple[tuple[str, str], ...]:
    if mode == "jsr":
        return tuple((i, j) for i in sys.states for j in sys.states)
    return tuple(sys.edges)


def build_lmi_problem(
    sys: RegimeSystem,
    mode: str,
    gamma: float,
    degree: int = 2,
    eps: float | None = None,
) -> LmiProblem:
    """Assemble the lifted feasibility data for one regime system."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if degree < 2 or degree % 2:
        raise ValueError(f"degree must be a positive even integer, got {degree}")
    m = degree // 2
    if m == 1:
        matrices = {s: np.asarray(sys.companion[s], dtype=float) for s in sys.states}
    else:
        matrices = {s: m_lift_matrix(sys.companion[s], m) for s in sys.states}
    if eps is None:
        top = max(float(np.linalg.norm(A, 2)) ** 2 for A in matrices.values())
        eps = 1e-8 * (1.0 + top)
    pairs = _mode_pairs(sys, mode)
    state_cones = pair_cones = None
    if mode == "rjsr":
        state_cones = {s: lift_cone(sys.cones[s], m) for s in sys.states}
        pair_cones = {}
        for (i, j) in pairs:
            stacked = np.vstack([sys.cones[i], sys.cones[j] @ sys.companion[i]])
            pair_cones[(i, j)] = lift_cone(stacked, m)
    return LmiProblem(
        mode=mode,
        degree=degree,
        gamma=float(gamma),
        eps=float(eps),
        states=tuple(sys.states),
        matrices=matrices,
        pairs=pairs,
        state_cones=state_cones,
        pair_cones=pair_cones,
    )


class _FeasibilitySession:
    """Reusable cvxpy problem with gamma^2 as a parameter.

    Building the conic program once and re-solving across the bisection grid
    keeps the search fast; every accepted solution is still re-checked by
    eigenvalue computation outside the solver.
    """

    def __init__(self, prob: LmiProblem):
        self.prob = prob
        L = prob.dim
        eye = np.eye(L)
        self.gamma_sq = cp.Parameter(nonneg=True)
        self.P = {s: cp.Variable((L, L), symmetric=True) for s in prob.states}
        self.U: dict[str, cp.Variable] = {}
        self.Uij: dict[tuple[str, str], cp.Variable] = {}
        constraints = []
        for s in prob.states:
            F = 0
            if prob.mode == "rjsr":
                E = prob.state_cones[s]
                U = cp.Variable((E.shape[0], E.shape[0]), symmetric=True)
                constraints.append(U >= 0)
                self.U[s] = U
                F = E.T @ U @ E
            constraints.append(self.P[s] - F >> prob.eps * eye)
        for (i, j) in prob.pairs:
            A = prob.matrices[i]
            G = 0
            if prob.mode == "rjsr":
                E = prob.pair_cones[(i, j)]
                U = cp.Variable((E.shape[0], E.shape[0]), symmetric=True)
                constraints.append(U >= 0)
                self.Uij[(i, j)] = U
                G = E.T @ U @ E
            constraints.append(
                self.gamma_sq * self.P[i] - A.T @ self.P[j] @ A - G >> prob.eps * eye
            )
        self.problem = cp.Problem(cp.Minimize(0), constraints)

    def solve(self, gamma: float, budget: int | None = None) -> LmiResult:
        prob = self.prob.with_gamma(gamma)
        self.gamma_sq.value = gamma**2
        try:
            self.problem.solve(solver="CLARABEL", max_iter=solver_budget(budget))
        except cp.SolverError:
            return LmiResult(status="not_proven")
        status = self.problem.status
        if status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            cert = self._extract(prob)
            if cert.min_eigen_margin > 0.0:
                return LmiResult(status="feasible", certificate=cert)
            return LmiResult(status="not_proven", certificate=cert)
        if status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
            return LmiResult(status="infeasible")
        if status == cp.USER_LIMIT:
            return LmiResult(status="budget_exhausted")
        return LmiResult(status="not_proven")

    def _extract(self, prob: LmiProblem) -> LyapunovCertificate:
        P = {s: _sym(self.P[s].value) for s in prob.states}
        multipliers = None
        if prob.mode == "rjsr":
            multipliers = {
                "state": {s: _clip_nonneg(self.U[s].value) for s in prob.states},
                "pair": {e: _clip_nonneg(self.Uij[e].value) for e in prob.pairs},
            }
        margin = certificate_margin(prob, P, multipliers)
        return LyapunovCertificate(
            gamma_certified=prob.gamma ** (1.0 / prob.m),
            degree=prob.degree,
            mode=prob.mode,
            P=P,
            multipliers=multipliers,
            min_eigen_margin=margin,
        )


def _sym(M: np.ndarray) -> np.ndarray:
    return (M + M.T) / 2.0


def _clip_nonneg(M: np.ndarray) -> np.ndarray:
    # solver iterates may sit a rounding error below zero; the margin check
    # runs against the clipped matrices that the certificate actually carries
    return np.maximum(_sym(M), 0.0)


def certificate_margin(prob: LmiProblem, P: dict, multipliers: dict | None) -> float:
    """Smallest eigenvalue over all certificate constraints (eps excluded)."""
    margin = math.inf
    for s in prob.states:
        F = 0.0
        if multipliers is not None:
            E = prob.state_cones[s]
            F = E.T @ multipliers["state"][s] @ E
        margin = min(margin, float(np.linalg.eigvalsh(_sym(P[s] - F))[0]))
    gamma_sq = prob.gamma**2
    for (i, j) in prob.pairs:
        A = prob.matrices[i]
        G = 0.0
        if multipliers is not None:
            E = prob.pair_cones[(i, j)]
            G = E.T @ multipliers["pair"][(i, j)] @ E
        M = gamma_sq * P[i] - A.T @ P[j] @ A - G
        margin = min(margin, float(np.linalg.eigvalsh(_sym(M))[0]))
    return margin


def lmi_feasible(prob: LmiProblem, budget: int | None = None) -> LmiResult:
    """Solve one feasibility instance and verify the result.

    'feasible' is only returned when the recomputed eigenvalue margin of the
    extracted certificate is strictly positive; solver claims are never
    taken on trust.  'infeasible' means the solver produced an improving-ray
    (dual) certificate for this program; anything else that stops the solver
    is reported as 'budget_exhausted' or 'not_proven'.
    """
    return _FeasibilitySession(prob).solve(prob.gamma, budget=budget)


# ---------------------------------------------------------------------------
# bisection


def _scaled_system(sys: RegimeSystem, factor: float) -> RegimeSystem:
    companion = {s: factor * sys.companion[s] for s in sys.states}
    pair_cones = {
        (i, j): np.vstack([sys.cones[i], sys.cones[j] @ companion[i]])
        for (i, j) in sys.edges
    }
    return RegimeSystem(
        p=sys.p,
        k=sys.k,
        d=sys.d,
        states=sys.states,
        companion=companion,
        cones=dict(sys.cones),
        edges=sys.edges,
        pair_cones=pair_cones,
    )


def _bisection_floor(sys: RegimeSystem, mode: str) -> float:
    """Lower edge of the bisection bracket.

    For arbitrary switching every companion radius is a true lower bound.
    For the constrained modes only states whose constant sequence is
    admissible contribute; for the cone-relaxed program this floor is a
    search convention rather than a bound on the relaxed quantity (the
    program can remain feasible below it), so the returned value is always
    a certified upper bound but not necessarily the tightest one the
    program admits.
    """
    if mode == "jsr":
        states = sys.states
    else:
        states = sys.self_admissible()
    return max((spectral_radius(sys.companion[s]) for s in states), default=0.0)


def _trivial_certificate(sys: RegimeSystem, mode: str, degree: int) -> LyapunovCertificate:
    L = lift_dimension(sys.d, degree // 2)
    return LyapunovCertificate(
        gamma_certified=0.0,
        degree=degree,
        mode=mode,
        P={s: np.eye(L) for s in sys.states},
        multipliers=None,
        min_eigen_margin=0.0,
    )


def bound_by_bisection(
    sys: RegimeSystem,
    mode: str,
    degree: int = 2,
    tol: float = 1e-3,
    budget: int | None = None,
) -> tuple[SpectralBound, LyapunovCertificate]:
    """Smallest verified-feasible growth-rate bound on a gamma grid.

    Bisects on the growth-rate scale between the mode's product floor and
    the depth-one norm bound (matrices are pre-scaled by the latter to
    condition the solves near one).  Feasibility is monotone in gamma, the
    grid is deterministic, and the returned value sits on the conservative
    (feasible) side within `tol`.  The attached certificate is re-derived at
    the returned gamma against the unscaled system, so it stands on its own.
    """
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    method = ("sdp_" if degree == 2 else "sos_") + mode
    witness = f"{mode}-degree{degree}"

    scale = max(float(np.linalg.norm(sys.companion[s], 2)) for s in sys.states)
    if scale == 0.0:
        return (
            SpectralBound(method=method, value=0.0, depth_or_degree=degree, witness=witness),
            _trivial_certificate(sys, mode, degree),
        )

    m = degree // 2
    lo = _bisection_floor(sys, mode)
    hi = scale * (1.0 + 1e-4)
    if lo > hi:
        raise ValueError(
            f"inconsistent bisection bracket: floor {lo} exceeds norm anchor {hi}"
        )

    scaled = _scaled_system(sys, 1.0 / scale)
    session = _FeasibilitySession(build_lmi_problem(scaled, mode, gamma=1.0, degree=degree))

    def feasible_at(beta: float) -> bool:
        return session.solve((beta / scale) ** m, budget=budget).feasible

    grow = 1e-4
    for _ in range(12):
        if feasible_at(hi):
            break
        grow *= 2.0
        hi = scale * (1.0 + grow)
    else:
        raise RuntimeError(
            f"feasibility anchor failed for mode {mode!r} at degree {degree}; "
            "the solver could not certify the depth-one norm bound"
        )

    for _ in range(_MAX_BISECTIONS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if feasible_at(mid):
            hi = mid
        else:
            lo = mid

    # re-derive the certificate against the unscaled system so it stands on
    # its own; strict feasibility at hi transfers exactly under scaling
    final = lmi_feasible(
        build_lmi_problem(sys, mode, gamma=hi**m, degree=degree), budget=budget
    )
    if not final.feasible:
        raise RuntimeError(
            f"certificate re-derivation failed at gamma={hi:.12g} for mode "
            f"{mode!r}, degree {degree}"
        )
    bound = SpectralBound(
        method=method, value=hi, depth_or_degree=degree, witness=witness
    )
    return bound, final.certificate


# ---------------------------------------------------------------------------
# certificate auditing


@dataclass(frozen=True)
class ValidationReport:
    """Sampling audit of a certificate against its system.

    Positivity is checked on each state's cone against the certificate's
    eigenvalue margin; decrease is checked on each transition cone with a
    (gamma^m + 1e-8) slack factor.  Pairs whose transition cone rejected
    every draw (the image cone is never entered from the source cone except
    on boundaries) are listed in empty_cones and skipped.
    """

    samples_requested: int
    samples_drawn: int
    violations: int
    max_decrease_violation: float
    max_positivity_violation: float
    empty_cones: tuple[tuple[str, str], ...]

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _sample_in_cone(rng: np.random.Generator, pattern: str, p: int, d: int) -> np.ndarray:
    """Gaussian draw with the lagged-y coordinates sign-fixed onto the cone."""
    z = rng.standard_normal(d)
    for j, sign in enumerate(pattern):
        v = abs(z[j * p])
        z[j * p] = v if sign == "+" else -v
    return z


def validate_certificate(
    sys: RegimeSystem,
    cert: LyapunovCertificate,
    samples: int = 1000,
    seed: int = 0,
) -> ValidationReport:
    """Check a certificate by sampling instead of trusting its provenance."""
    for s in sys.states:
        if s not in cert.P:
            raise ValueError(f"certificate has no form for state {s!r}")
        if cert.P[s].shape[0] != lift_dimension(sys.d, cert.degree // 2):
            raise ValueError(
                "certificate dimension does not match the system "
                f"(state {s!r}: {cert.P[s].shape} for d={sys.d}, degree={cert.degree})"
            )
    m = cert.degree // 2
    gamma_m = cert.gamma_certified**m
    slack = (gamma_m + 1e-8) ** 2
    floor = max(cert.min_eigen_margin, 0.0)
    pairs = _mode_pairs(sys, cert.mode)

    ss = np.random.SeedSequence(seed)
    children = ss.spawn(len(sys.states) + len(pairs))
    lift = (lambda w: w) if m == 1 else (lambda w: m_lift_vector(w, m))

    violations = 0
    max_dec = 0.0
    max_pos = 0.0
    drawn = 0
    empty: list[tuple[str, str]] = []

    for idx, s in enumerate(sys.states):
        rng = np.random.default_rng(children[idx])
        P = cert.P[s]
        for _ in range(samples):
            w = _sample_in_cone(rng, s, sys.p, sys.d)
            wl = lift(w)
            form = float(wl @ P @ wl)
            lower = floor * float(w @ w) ** m
            viol = lower * (1.0 - 1e-9) - form - 1e-12 * (1.0 + lower)
            drawn += 1
            if viol > 0:
                violations += 1
                max_pos = max(max_pos, viol)

    for idx, (i, j) in enumerate(pairs):
        rng = np.random.default_rng(children[len(sys.states) + idx])
        F = sys.companion[i]
        Ej = sys.cones[j]
        Pi, Pj = cert.P[i], cert.P[j]
        accepted = 0
        attempts = 0
        max_attempts = 64 * samples
        while accepted < samples and attempts < max_attempts:
            attempts += 1
            w = _sample_in_cone(rng, i, sys.p, sys.d)
            img = F @ w
            if np.any(Ej @ img < 0.0):
                continue
            accepted += 1
            drawn += 1
            wl = lift(w)
            il = lift(img)
            lhs = float(il @ Pj @ il)
            rhs = float(wl @ Pi @ wl)
            viol = lhs - slack * rhs - 1e-12 * (1.0 + abs(rhs))
            if viol > 0:
                violations += 1
                max_dec = max(max_dec, viol)
        if accepted == 0:
            empty.append((i, j))

    return ValidationReport(
        samples_requested=samples,
        samples_drawn=drawn,
        violations=violations,
        max_decrease_violation=max_dec,
        max_positivity_violation=max_pos,
        empty_cones=tuple(empty),
    )


def certificate_to_dict(cert: LyapunovCertificate) -> dict:
    out = {
        "mode": cert.mode,
        "degree": cert.degree,
        "gamma": cert.gamma_certified,
        "P": {s: np.asarray(P).tolist() for s, P in cert.P.items()},
        "margin": cert.min_eigen_margin,
    }
    if cert.multipliers is not None:
        out["multipliers"] = {
            "state": {s: np.asarray(U).tolist() for s, U in cert.multipliers["state"].items()},
            "pair": {
                f"{i}->{j}": np.asarray(U).tolist()
                for (i, j), U in cert.multipliers["pair"].items()
            },
        }
    return out
