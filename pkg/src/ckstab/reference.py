"""Bundled benchmark parametrizations with published reference values.

Three suites ship with the package:

* ``table1`` — the two-variable policy-rate model over a grid of
  (chi, theta, psi) with mu = 0.5 and gamma_tr = 1.5, with reference values
  for the certified arbitrary-switching bound.
* ``table2`` — univariate two-lag models with sign-dependent coefficients,
  with reference values for all three bounds in the hierarchy.
* ``example3`` — a three-variable one-lag system whose two regime matrices
  are individually stable (radii 0.85 and 0.98) while alternation makes the
  dynamics unstable; reference values cover the radii and the certified
  arbitrary-switching bound.

The ``reproduce`` CLI command recomputes each suite and reports computed
against reference values.
"""

from __future__ import annotations

import numpy as np

from .model import CksvarModel, MonetaryModelSpec, build_monetary

__all__ = [
    "MONETARY_ROWS",
    "UNIVARIATE_ROWS",
    "EXPLOSIVE_REFERENCE",
    "monetary_row_model",
    "univariate_model",
    "explosive_model",
    "REPRODUCE_SUITES",
]

# (chi, theta, psi, reference certified bound); mu = 0.5, gamma_tr = 1.5
MONETARY_ROWS: tuple[tuple[float, float, float, float], ...] = (
    (0.2, -0.5, 0.1, 0.145),
    (0.2, -0.5, 0.5, 0.5),
    (0.2, -0.5, 0.9, 0.9),
    (0.7, -1.0, 0.1, 0.4),
    (0.7, -1.0, 0.5, 0.5),
    (0.7, -1.0, 0.9, 0.9),
    (0.99, -0.5, 0.1, 0.72),
    (0.99, -0.5, 0.5, 0.72),
    (0.99, -0.5, 0.9, 0.9),
)

# (phi1+, phi1-, phi2+, phi2-, ref jsr, ref cjsr, ref rjsr)
UNIVARIATE_ROWS: tuple[tuple[float, float, float, float, float, float, float], ...] = (
    (0.6, 0.2, 0.3, 0.1, 0.925, 0.925, 0.925),
    (0.6, 0.3, 0.4, 0.1, 1.000, 1.000, 1.000),
    (0.7, 0.2, -0.1, 0.0, 0.700, 0.500, 0.500),
    (1.2, 0.6, -1.2, -0.6, 1.245, 1.118, 1.095),
    (1.0, 0.5, -0.97, -0.5, 1.105, 1.001, 0.985),
)

EXPLOSIVE_REFERENCE = {
    "radius_plus": 0.85,
    "radius_minus": 0.98,
    "jsr_upper": 1.31,
}


def monetary_row_model(
    chi: float, theta: float, psi: float, mu: float = 0.5, gamma_tr: float = 1.5
) -> CksvarModel:
    return build_monetary(
        MonetaryModelSpec(chi=chi, theta=theta, gamma_tr=gamma_tr, mu=mu, psi=psi)
    )


def univariate_model(
    phi1_plus: float,
    phi1_minus: float,
    phi2_plus: float,
    phi2_minus: float,
    sigma: float = 1.0,
) -> CksvarModel:
    """Univariate model with two sign-dependent lags (already canonical)."""
    return CksvarModel(
        p=1,
        k=2,
        b=0.0,
        phi0_plus=np.array([1.0]),
        phi0_minus=np.array([1.0]),
        phi0_x=np.zeros((1, 0)),
        lag_plus=(np.array([phi1_plus]), np.array([phi2_plus])),
        lag_minus=(np.array([phi1_minus]), np.array([phi2_minus])),
        lag_x=(np.zeros((1, 0)), np.zeros((1, 0))),
        c=np.array([0.0]),
        sigma=np.array([[sigma]]),
    )


def explosive_model(sigma_scale: float = 1.0) -> CksvarModel:
    """Three-variable system whose regimes are stable but whose alternation
    is not: the product of the two regime matrices has spectral radius
    above one."""
    phi1_plus = np.array([-1.37, 0.79, 0.76])
    phi1_x = np.array([[-1.00, 0.36], [0.39, -1.33], [0.71, 0.03]])
    phi0_x = np.zeros((3, 2))
    phi0_x[1:, :] = np.eye(2)
    return CksvarModel(
        p=3,
        k=1,
        b=0.0,
        phi0_plus=np.array([1.0, 0.0, 0.0]),
        phi0_minus=np.array([1.0, 0.0, 0.0]),
        phi0_x=phi0_x,
        lag_plus=(phi1_plus,),
        lag_minus=(np.zeros(3),),
        lag_x=(phi1_x,),
        c=np.zeros(3),
        sigma=sigma_scale * np.eye(3),
    )


REPRODUCE_SUITES = ("table1", "table2", "example3")
