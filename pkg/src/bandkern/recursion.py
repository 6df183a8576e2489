"""Coefficient recursions for the lower-triangular re-expansion matrix, the
companion matrices driving them, product-norm estimates and boundedness
diagnostics.

Writing L for the matrix of basis Taylor coefficients and Lhat for the
Taylor coefficients of z^n * phi(z), the unique lower-triangular solution C
of Lhat = L C obeys

    c_{n,n}   = 1
    c_{n+k,n} = beta_k - sum_{i=1..min(k,J)} beta_i a_{n+k-i}^i c_{n+k-i,n}

with beta_k = 0 for k > J.  Windows of length J of each column advance by a
J x J companion matrix whose norm products decide whether C extends to a
bounded operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .core import (
    BoundaryConfig,
    SearchFailureError,
    WeightSequence,
    beta_coefficients,
    phi_from_roots,
)

LIKELY_BOUNDED = "likely-bounded"
LIKELY_UNBOUNDED = "likely-unbounded"
INCONCLUSIVE = "inconclusive"

_SVD_LIMIT = 512          # dense SVD below, power iteration above
_POWER_TOL = 1e-8
_POWER_MAXIT = 10_000


# ---------------------------------------------------------------------------
# columns of C
# ---------------------------------------------------------------------------

def c_column(n: int, K_max: int, cfg: BoundaryConfig,
             weights: WeightSequence) -> np.ndarray:
    """Column prefix c_{n+k,n} for k = 0..K_max."""
    beta = beta_coefficients(cfg)
    J = len(beta) - 1
    if K_max < J:
        raise ValueError("K_max must be at least the bandwidth J")
    a = weights.a(np.arange(n, n + K_max + 1))
    col = np.zeros(K_max + 1, dtype=complex)
    col[0] = 1.0
    for k in range(1, K_max + 1):
        s = beta[k] if k <= J else 0.0
        for i in range(1, min(k, J) + 1):
            s -= beta[i] * a[k - i] ** i * col[k - i]
        col[k] = s
    return col


def c_section(N: int, cfg: BoundaryConfig, weights: WeightSequence) -> np.ndarray:
    """Dense N x N leading section of C, all columns at once.

    Sweeps by diagonal offset so every numpy operation covers a full
    diagonal; equivalent to stacking c_column(n, ...) for n < N.
    """
    if N > 8192:
        raise ValueError("dense sections are capped at N = 8192; "
                         "use c_column for individual columns")
    beta = beta_coefficients(cfg)
    J = len(beta) - 1
    a = np.asarray(weights.prefix(N + 1), dtype=complex)
    diags = [np.ones(N, dtype=complex)]
    for k in range(1, N):
        m = N - k
        d = np.full(m, beta[k] if k <= J else 0.0, dtype=complex)
        for i in range(1, min(k, J) + 1):
            d -= beta[i] * a[k - i:k - i + m] ** i * diags[k - i][:m]
        diags.append(d)
    C = np.zeros((N, N), dtype=complex)
    idx = np.arange(N)
    for k, d in enumerate(diags):
        C[idx[: N - k] + k, idx[: N - k]] = d
    if np.all(np.abs(C.imag) < 1e-300):
        return C.real
    return C


def L_section(N: int, cfg: BoundaryConfig, weights: WeightSequence) -> np.ndarray:
    """Banded lower-triangular matrix of basis Taylor coefficients."""
    beta = beta_coefficients(cfg)
    J = len(beta) - 1
    a = np.asarray(weights.prefix(N), dtype=complex)
    L = np.zeros((N, N), dtype=complex)
    for k in range(J + 1):
        n = np.arange(0, N - k)
        L[n + k, n] = beta[k] * a[n] ** k
    return L


def Lhat_section(N: int, cfg: BoundaryConfig) -> np.ndarray:
    """Banded lower-triangular Taylor coefficients of z^n * phi(z)."""
    beta = beta_coefficients(cfg)
    J = len(beta) - 1
    M = np.zeros((N, N), dtype=complex)
    for k in range(J + 1):
        n = np.arange(0, N - k)
        M[n + k, n] = beta[k]
    return M


def triangular_solve_oracle(N: int, cfg: BoundaryConfig,
                            weights: WeightSequence) -> np.ndarray:
    """Solve Lhat = L C directly by dense forward substitution.

    Independent of c_column / c_section: relies on scipy's triangular
    solver, so recursion bugs cannot hide in both routes at once.
    """
    J = len(beta_coefficients(cfg)) - 1
    if N < J + 1:
        raise ValueError("section too small for the bandwidth")
    L = L_section(N, cfg, weights)
    Lhat = Lhat_section(N, cfg)
    return solve_triangular(L, Lhat, lower=True, unit_diagonal=True)


class ColumnBandMatrix:
    """Lazily generated lower-triangular matrix stored column by column.

    ``generator(n, K_max)`` must return the column prefix starting at the
    diagonal entry (row n) and extending K_max rows below it.  Computed
    prefixes are cached and only extended, never recomputed.
    """

    def __init__(self, generator: Callable[[int, int], np.ndarray],
                 min_rows: int = 8):
        self._generator = generator
        self._min_rows = min_rows
        self._columns: dict = {}

    def column(self, n: int, K_max: int) -> np.ndarray:
        cached = self._columns.get(n)
        if cached is None or len(cached) < K_max + 1:
            cached = np.asarray(
                self._generator(n, max(K_max, self._min_rows)), dtype=complex)
            self._columns[n] = cached
        return cached[: K_max + 1]

    def section(self, N: int) -> np.ndarray:
        out = np.zeros((N, N), dtype=complex)
        for n in range(N):
            col = self.column(n, N - 1 - n)
            out[n: n + len(col), n] = col
        return out

    def column_l2_norms(self, N: int) -> np.ndarray:
        """l2 norms of the first N rows of each of the first N columns."""
        return np.array([
            np.linalg.norm(self.column(n, N - 1 - n)) for n in range(N)
        ])


def c_matrix(cfg: BoundaryConfig, weights: WeightSequence) -> ColumnBandMatrix:
    return ColumnBandMatrix(lambda n, K: c_column(n, K, cfg, weights))


# ---------------------------------------------------------------------------
# companion matrices and eigenstructure
# ---------------------------------------------------------------------------

def companion_matrix(n: int, cfg: BoundaryConfig,
                     weights: WeightSequence) -> np.ndarray:
    """J x J companion matrix M_n: shift rows above the weighted bottom row
    (-beta_J a_{n-J+1}^J, ..., -beta_2 a_{n-1}^2, -beta_1 a_n).

    The column window v_{j,n} = (c_{j-J+1,n}, ..., c_{j,n}) advances by
    v_{j,n} = M_{j-1} v_{j-1,n} for j > n + J.
    """
    beta = beta_coefficients(cfg)
    J = len(beta) - 1
    if n - J + 1 < 0:
        raise ValueError("companion matrix needs n >= J - 1")
    M = np.zeros((J, J), dtype=complex)
    for r in range(J - 1):
        M[r, r + 1] = 1.0
    idx = np.arange(J)
    powers = J - idx
    M[J - 1, :] = -beta[powers] * np.asarray(
        weights.a(n - J + 1 + idx), dtype=complex) ** powers
    return M


def companion_limit(cfg: BoundaryConfig) -> np.ndarray:
    """Entrywise limit of M_n: bottom row (-beta_J, ..., -beta_1)."""
    beta = beta_coefficients(cfg)
    J = len(beta) - 1
    M = np.zeros((J, J), dtype=complex)
    for r in range(J - 1):
        M[r, r + 1] = 1.0
    M[J - 1, :] = -beta[J - np.arange(J)]
    return M


@dataclass(frozen=True)
class EigenBasis:
    """Eigenvectors nu_j = (z_j^{J-1}, ..., z_j, 1) of the limit companion
    matrix, with eigenvalues w_j."""

    X: np.ndarray
    Xinv: np.ndarray
    eigvals: np.ndarray


def eigen_basis(cfg: BoundaryConfig) -> EigenBasis:
    J = cfg.J
    z = np.asarray(cfg.roots)
    X = np.column_stack([z_j ** np.arange(J - 1, -1, -1) for z_j in z])
    Xinv = np.linalg.inv(X)
    return EigenBasis(X, Xinv, np.asarray(cfg.conjugates))


def advance_window(v: np.ndarray, j: int, cfg: BoundaryConfig,
                   weights: WeightSequence) -> np.ndarray:
    """v_{j,n} from v_{j-1,n}: multiply by the companion matrix at index j-1."""
    return companion_matrix(j - 1, cfg, weights) @ np.asarray(v, dtype=complex)


def starting_vector(n: int, cfg: BoundaryConfig,
                    weights: WeightSequence) -> np.ndarray:
    """v_{n+J,n} = (c_{n+1,n}, ..., c_{n+J,n})."""
    J = cfg.J
    return c_column(n, J, cfg, weights)[1:]


def nu0_expansion(cfg: BoundaryConfig) -> np.ndarray:
    """Coefficients -w_j / phi'(z_j) expressing (0,...,0,1) in the
    eigenvector basis."""
    phi_prime = phi_from_roots(cfg).derivative()
    out = []
    for z, w in zip(cfg.roots, cfg.conjugates):
        d = complex(phi_prime(z))
        if abs(d) < 1e-300:
            raise ZeroDivisionError("phi' vanishes at a root")
        out.append(-w / d)
    return np.asarray(out)


# ---------------------------------------------------------------------------
# limit-point search and product norms
# ---------------------------------------------------------------------------

def mu_search(cfg: BoundaryConfig, epsilon: float, cap: int = 10 ** 6) -> int:
    """Smallest mu <= cap with max_j |z_j^mu - 1| < epsilon.

    For rational angles the least common multiple of the denominators always
    works exactly, so the search is capped by it.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if cfg.angles is not None:
        lcm = 1
        for q in cfg.angles:
            lcm = lcm * q.denominator // math.gcd(lcm, q.denominator)
        limit = min(cap, lcm)
    else:
        limit = cap
    thetas = np.array([
        float(2 * math.pi * (Fraction(q) % 1)) for q in cfg.angles
    ]) if cfg.angles is not None else np.angle(np.asarray(cfg.roots))

    best_mu, best_err = None, np.inf
    chunk = 65536
    mu0 = 1
    while mu0 <= limit:
        mus = np.arange(mu0, min(limit, mu0 + chunk - 1) + 1)
        # |e^{i t} - 1| = 2 |sin(t/2)|
        err = np.max(2.0 * np.abs(np.sin(np.outer(mus, thetas) / 2.0 % math.pi)), axis=1)
        hit = np.nonzero(err < epsilon)[0]
        i_best = int(np.argmin(err))
        if err[i_best] < best_err:
            best_err, best_mu = float(err[i_best]), int(mus[i_best])
        if hit.size:
            return int(mus[hit[0]])
        mu0 += chunk
    if cfg.angles is not None and lcm <= cap:
        return lcm  # exact fallback: floating search cannot miss by much
    raise SearchFailureError(
        f"no mu <= {cap} brings all z_j^mu within {epsilon} of 1",
        best=best_mu, best_error=best_err,
    )


def product_norm(n: int, mu: int, cfg: BoundaryConfig, weights: WeightSequence,
                 conjugated: bool = False) -> float:
    """Spectral norm of M_{n+mu-1} ... M_n, optionally conjugated into the
    eigenvector basis of the limit matrix (Mhat = X^{-1} M X)."""
    if n <= cfg.J:
        raise ValueError("product requires n > J")
    basis = eigen_basis(cfg) if conjugated else None
    P = np.eye(cfg.J, dtype=complex)
    for m in range(n, n + mu):
        M = companion_matrix(m, cfg, weights)
        if basis is not None:
            M = basis.Xinv @ M @ basis.X
        P = M @ P
    return float(np.linalg.norm(P, 2))


@dataclass(frozen=True)
class LinearizationParts:
    """M_{n+k} = M_inf + (p/n) B + R with the residual scale E = n * max|R|."""

    B: np.ndarray
    R: np.ndarray
    E: float


def linearization_parts(n: int, k: int, cfg: BoundaryConfig,
                        weights: WeightSequence) -> LinearizationParts:
    """Split M_{n+k} into limit + first-order + residual parts.

    B's bottom row is (J beta_J, ..., 2 beta_2, beta_1); the residual bottom
    row carries (1 - a_{n+k-i+1}^i - i p / n) beta_i at the slot of beta_i.
    """
    if n <= cfg.J:
        raise ValueError("linearization requires n > J")
    beta = beta_coefficients(cfg)
    J = len(beta) - 1
    p = weights.p
    B = np.zeros((J, J), dtype=complex)
    powers = J - np.arange(J)
    B[J - 1, :] = powers * beta[powers]
    M = companion_matrix(n + k, cfg, weights)
    R = M - companion_limit(cfg) - (p / n) * B
    E = float(n * np.max(np.abs(R)))
    return LinearizationParts(B, R, E)


# ---------------------------------------------------------------------------
# norm estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormEstimate:
    truncation: int
    value: float
    method: str
    iterations: int


def estimate_norm(M: np.ndarray, warm_start: Optional[np.ndarray] = None,
                  tol: float = _POWER_TOL, maxit: int = _POWER_MAXIT):
    """Spectral norm of a dense section: exact SVD up to size 512, power
    iteration on the Gram operator above it.

    Returns (NormEstimate, top_right_singular_vector); feeding the vector of
    one dyadic section into the next as warm start keeps the power-iteration
    estimates nondecreasing across nested truncations (the padded previous
    vector already achieves the previous norm, and the Gram norm ratios only
    grow from there).
    """
    N = M.shape[0]
    if N <= _SVD_LIMIT:
        _, s, vh = np.linalg.svd(M)
        return NormEstimate(N, float(s[0]), "dense-SVD", 0), vh[0].conj()
    rng = np.random.default_rng(N)
    if np.iscomplexobj(M):
        x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    else:
        x = rng.standard_normal(N)
    x = x / np.linalg.norm(x)
    if warm_start is not None:
        pad = np.zeros(N, dtype=np.result_type(x.dtype, warm_start.dtype))
        pad[: len(warm_start)] = warm_start
        x = pad + 0.05 * x.astype(pad.dtype)
        x = x / np.linalg.norm(x)
    Mh = M.conj().T
    lam = 0.0
    it = 0
    for it in range(1, maxit + 1):
        y = Mh @ (M @ x)
        ny = np.linalg.norm(y)
        new = math.sqrt(ny)
        converged = abs(new - lam) <= tol * max(new, 1.0)
        lam = new
        x = y / ny
        if converged:
            break
    return NormEstimate(N, float(lam), "power-iteration", it), x


def growth_verdict(values: Sequence[float], plateau_tol: float = 1e-3,
                   growth_tol: float = 0.05) -> str:
    """Three-way verdict from a nondecreasing sequence at dyadic truncations.

    Plateau (last-doubling relative increase below plateau_tol) declares
    likely-bounded outright.  A sequence whose increments decay geometrically
    is Cauchy: when the extrapolated remaining growth d*r/(1-r) stays within
    ten plateau tolerances it is also declared likely-bounded.  Sustained
    relative growth beyond growth_tol declares likely-unbounded.
    """
    if len(values) < 2 or values[-1] <= 0:
        return INCONCLUSIVE
    rel = (values[-1] - values[-2]) / values[-1]
    if rel < plateau_tol:
        return LIKELY_BOUNDED
    diffs = np.diff(np.asarray(values, dtype=float))
    if len(diffs) >= 3 and np.all(diffs > 0):
        ratios = diffs[1:] / diffs[:-1]
        r = float(np.max(ratios[-2:]))
        if r <= 0.85:
            remaining = diffs[-1] * r / (1.0 - r)
            if remaining / values[-1] < 10 * plateau_tol:
                return LIKELY_BOUNDED
    if rel > growth_tol:
        return LIKELY_UNBOUNDED
    return INCONCLUSIVE


@dataclass(frozen=True)
class ContainmentReport:
    truncations: tuple
    norm_estimates: tuple
    column_norms: np.ndarray
    plateau_rel: float
    rate_measured: Optional[float]
    rate_margin: float
    verdict: str
    verdict_reason: str


def decay_rate_samples(cfg: BoundaryConfig, weights: WeightSequence,
                       samples: Sequence[int] = (2000, 8000, 32000, 128000),
                       epsilon: float = 1e-2) -> Optional[np.ndarray]:
    """Samples of the normalized product-norm decay rate
    n (1 - ||Mhat_{n+mu-1} ... Mhat_n||) / mu at large n.

    The boundedness dichotomy compares this quantity against 1/2; a verdict
    only needs every sample on the same side of the threshold, not a settled
    limit.  Returns None when no limit-point exponent mu is found.
    """
    try:
        mu = mu_search(cfg, epsilon)
    except SearchFailureError:
        return None
    vals = []
    for n in samples:
        nrm = product_norm(n, mu, cfg, weights, conjugated=True)
        vals.append(n * (1.0 - nrm) / mu)
    return np.asarray(vals)


def containment_report(cfg: BoundaryConfig, weights: WeightSequence,
                       N_list: Sequence[int], plateau_tol: float = 1e-3,
                       rate_margin: float = 0.05) -> ContainmentReport:
    """Norm growth of truncations of C plus a boundedness verdict.

    The verdict first applies the plateau rule (last-doubling relative
    increase below plateau_tol).  When truncated norms are still visibly
    growing, the boundedness dichotomy takes over: sampled decay rates of
    conjugated companion products are compared against 1/2, which is the
    decidable side of the problem; samples straddling the threshold stay
    inconclusive.  All numbers feeding the verdict are reported.
    """
    N_list = sorted(int(N) for N in N_list)
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError("truncations must be strictly increasing")
    Nmax = N_list[-1]
    C = c_section(Nmax, cfg, weights)
    estimates = []
    warm = None
    for N in N_list:
        est, warm = estimate_norm(C[:N, :N], warm)
        estimates.append(est)
    col_norms = np.linalg.norm(C, axis=0)
    values = [e.value for e in estimates]
    plateau_rel = (values[-1] - values[-2]) / values[-1] if len(values) > 1 else np.inf

    rate = None
    if plateau_rel < plateau_tol:
        verdict, reason = LIKELY_BOUNDED, "plateau"
    else:
        reason = "decay-rate"
        samples = decay_rate_samples(cfg, weights)
        if samples is None:
            verdict = INCONCLUSIVE
        elif np.all(samples > 0.5 + rate_margin):
            verdict, rate = LIKELY_BOUNDED, float(np.min(samples))
        elif np.all(samples < 0.5 - rate_margin):
            verdict, rate = LIKELY_UNBOUNDED, float(np.max(samples))
        else:
            verdict = INCONCLUSIVE
            rate = float(np.median(samples))
    return ContainmentReport(
        tuple(N_list), tuple(estimates), col_norms, float(plateau_rel),
        rate, rate_margin, verdict, reason,
    )


def adams_mcguire_matrix(p: float, N: int) -> np.ndarray:
    """The comparison matrix whose boundedness is equivalent to p > 1/2:
    zero on and above the diagonal, entry (n, k) = p/(k+2) ((k+2)/(n+1))^p
    below it."""
    if p <= 0:
        raise ValueError("p must be positive")
    M = np.zeros((N, N))
    for n in range(1, N):
        k = np.arange(n)
        M[n, :n] = p / (k + 2.0) * ((k + 2.0) / (n + 1.0)) ** p
    return M


# ---------------------------------------------------------------------------
# starting-vector decay
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StartingDecayFit:
    """Measured constant D1 in ||v_{n+J,n}|| <= D1 * p / (n + J).

    ``measured_max`` scans a finite fit range; ``asymptote`` is the limit of
    ||v_{n+J,n}|| (n+J)/p predicted from the window recursion (the entries
    of v factor as (1 - a_n) * alpha_{n,j} with alpha converging), scaled by
    the supremum of the weight-family factor beyond the fit range.
    """

    D1: float
    measured_max: float
    asymptote: float


def starting_alpha_limit(cfg: BoundaryConfig) -> np.ndarray:
    """Limits lambda_j of c_{n+j,n}/(1 - a_n):
    lambda_j = j beta_j - sum_{i<j} beta_i lambda_{j-i}."""
    beta = beta_coefficients(cfg)
    J = len(beta) - 1
    lam = np.zeros(J, dtype=complex)
    for j in range(1, J + 1):
        s = j * beta[j]
        for i in range(1, j):
            s -= beta[i] * lam[j - i - 1]
        lam[j - 1] = s
    return lam


def fit_starting_decay(cfg: BoundaryConfig, weights: WeightSequence,
                       n_fit: int = 64) -> StartingDecayFit:
    if not weights.rate_hypothesis:
        raise ValueError("decay fit requires n (1 - a_n) -> p weights")
    J, p = cfg.J, weights.p
    measured = max(
        float(np.linalg.norm(starting_vector(n, cfg, weights))) * (n + J) / p
        for n in range(J + 1, n_fit + 1)
    )
    lam = np.linalg.norm(starting_alpha_limit(cfg))
    asym = float(lam) * weights.decay_factor_sup(n_fit + 1, J)
    return StartingDecayFit(max(measured, asym), measured, asym)
