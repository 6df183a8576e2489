"""Multiplication by the independent variable in the basis, expansion of the
constant function and polynomial membership diagnostics.

The matrix of z-multiplication in the basis f_n is strictly lower
triangular with ones on the first subdiagonal; its deeper entries satisfy
the same homogeneous window recursion as the re-expansion matrix, so the
boundedness machinery carries over unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .basis_kernel import eval_f_prefix
from .core import BoundaryConfig, Poly, WeightSequence, beta_coefficients
from .recursion import estimate_norm, growth_verdict


@dataclass(frozen=True)
class MultiplierColumn:
    """Column n of the z-multiplication matrix: entries c_{k,n} for
    k = n+1 .. n+K_max (everything at or above the diagonal vanishes)."""

    n: int
    entries: np.ndarray

    @property
    def rows(self) -> np.ndarray:
        return np.arange(self.n + 1, self.n + 1 + len(self.entries))


def mz_column(n: int, K_max: int, cfg: BoundaryConfig,
              weights: WeightSequence) -> MultiplierColumn:
    """Coefficients of z * f_n in the basis: c_{n+1,n} = 1 and
    c_{n+j+1,n} = beta_j a_n^j - sum_{i=1..min(j,J)} beta_i a_{n+j+1-i}^i
    c_{n+j+1-i,n}, the sum turning homogeneous past the bandwidth."""
    beta = beta_coefficients(cfg)
    J = len(beta) - 1
    if K_max < J + 1:
        raise ValueError("K_max must be at least J + 1")
    a = np.asarray(weights.a(np.arange(n, n + K_max + 1)), dtype=complex)
    ents = np.zeros(K_max, dtype=complex)  # ents[j] = c_{n+1+j,n}
    ents[0] = 1.0
    for j in range(1, K_max):
        s = beta[j] * a[0] ** j if j <= J else 0.0
        for i in range(1, min(j, J) + 1):
            s -= beta[i] * a[j + 1 - i] ** i * ents[j - i]
        ents[j] = s
    return MultiplierColumn(n, ents)


def mz_section(N: int, cfg: BoundaryConfig, weights: WeightSequence) -> np.ndarray:
    """Dense N x N leading section of the z-multiplication matrix."""
    Z = np.zeros((N, N), dtype=complex)
    for n in range(N - 1):
        col = mz_column(n, N - 1 - n if N - 1 - n > cfg.J else cfg.J + 1,
                        cfg, weights)
        k = min(len(col.entries), N - 1 - n)
        Z[n + 1: n + 1 + k, n] = col.entries[:k]
    if np.all(np.abs(Z.imag) < 1e-300):
        return Z.real
    return Z


def mz_apply(alpha, cfg: BoundaryConfig, weights: WeightSequence) -> np.ndarray:
    """Basis coefficients of z * f for f = sum alpha_n f_n (same prefix length)."""
    alpha = np.asarray(alpha, dtype=complex)
    N = len(alpha)
    return mz_section(N, cfg, weights) @ alpha


@dataclass(frozen=True)
class ExpansionReport:
    """Coefficients with their running l2 norms and a plateau verdict."""

    coeffs: np.ndarray
    checkpoints: np.ndarray
    partial_norms: np.ndarray
    verdict: str


def _l2_checkpoints(coeffs: np.ndarray):
    N = len(coeffs)
    checks = []
    m = 16
    while m < N:
        checks.append(m)
        m *= 2
    checks.append(N)
    csum = np.cumsum(np.abs(coeffs) ** 2)
    return np.asarray(checks), np.sqrt(csum[np.asarray(checks) - 1])


def constant_expansion(N: int, cfg: BoundaryConfig,
                       weights: WeightSequence) -> ExpansionReport:
    """Coefficients c_n of the constant function 1 = sum c_n f_n:
    c_0 = 1, c_j = -sum_{i=1..min(j,J)} c_{j-i} beta_i a_{j-i}^i."""
    if N < 1:
        raise ValueError("N must be positive")
    beta = beta_coefficients(cfg)
    J = len(beta) - 1
    a = np.asarray(weights.prefix(N + 1), dtype=complex)
    c = np.zeros(N + 1, dtype=complex)
    c[0] = 1.0
    for j in range(1, N + 1):
        s = 0.0 + 0.0j
        for i in range(1, min(j, J) + 1):
            s -= c[j - i] * beta[i] * a[j - i] ** i
        c[j] = s
    checks, norms = _l2_checkpoints(c)
    return ExpansionReport(c, checks, norms, _plateau_verdict(norms))


def _plateau_verdict(norms: np.ndarray, plateau_tol: float = 1e-3,
                     growth_tol: float = 0.05) -> str:
    return growth_verdict(list(norms), plateau_tol, growth_tol)


def polynomial_membership(poly: Poly, N: int, cfg: BoundaryConfig,
                          weights: WeightSequence) -> ExpansionReport:
    """Candidate basis coefficients of a polynomial by banded forward
    substitution of its Taylor coefficients, with the l2 plateau verdict.

    The unit diagonal of the basis matrix determines the coefficients
    uniquely; membership shows up as a plateau of the running norms.
    """
    from .decomposition import taylor_to_basis

    if poly.degree >= N:
        raise ValueError("prefix too short for the polynomial degree")
    taylor = np.zeros(N + 1, dtype=complex)
    taylor[: len(poly.coeffs)] = poly.coeffs
    alpha = taylor_to_basis(taylor, cfg, weights)
    checks, norms = _l2_checkpoints(alpha)
    return ExpansionReport(alpha, checks, norms, _plateau_verdict(norms))


@dataclass(frozen=True)
class MultiplierNormReport:
    truncations: tuple
    full_norms: tuple            # NormEstimate per truncation
    shifted_norms: tuple         # same with the unit subdiagonal removed
    verdict: str


def mz_norm_report(cfg: BoundaryConfig, weights: WeightSequence,
                   N_list: Sequence[int], plateau_tol: float = 1e-3,
                   growth_tol: float = 0.05) -> MultiplierNormReport:
    """Truncated multiplication-matrix norms at dyadic sizes, both as-is and
    with the leading subdiagonal of ones removed (the shift part is an
    isometry and can mask growth of the remainder)."""
    N_list = sorted(int(N) for N in N_list)
    Nmax = N_list[-1]
    Z = mz_section(Nmax, cfg, weights)
    S = Z.copy()
    idx = np.arange(Nmax - 1)
    S[idx + 1, idx] = 0.0
    full, shifted = [], []
    warm_f = warm_s = None
    for N in N_list:
        est, warm_f = estimate_norm(Z[:N, :N], warm_f)
        full.append(est)
        est_s, warm_s = estimate_norm(S[:N, :N], warm_s)
        shifted.append(est_s)
    verdict = growth_verdict([e.value for e in full], plateau_tol, growth_tol)
    return MultiplierNormReport(tuple(N_list), tuple(full), tuple(shifted), verdict)


def constant_sup_error(coeffs: np.ndarray, cfg: BoundaryConfig,
                       weights: WeightSequence, radius: float = 0.9,
                       n_grid: int = 64) -> float:
    """sup over a circle |z| = radius of |sum_n c_n f_n(z) - 1|."""
    worst = 0.0
    N = len(coeffs)
    for t in np.linspace(0.0, 2 * np.pi, n_grid, endpoint=False):
        z = radius * np.exp(1j * t)
        val = np.sum(coeffs * eval_f_prefix(N, z, cfg, weights))
        worst = max(worst, abs(val - 1.0))
    return worst
