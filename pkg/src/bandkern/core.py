"""Boundary configurations, weight sequences, polynomial arithmetic and the
symmetric-function identities used throughout the package.

Each space handled here is generated by an orthonormal basis
``f_n(z) = z^n * phi(a_n z)`` where ``phi(z) = prod_j (1 - w_j z)`` collects
finitely many distinct unimodular points ``z_j`` (``w_j`` their conjugates)
and ``a_n -> 1``.  This module owns ``phi``, the weights ``a_n`` and the
combinatorial helpers (complete homogeneous sums, the discriminant-like
products ``mu_j`` and the associated power-sum identity).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

TOL_UNIT = 1e-12      # |z_j| deviation from the unit circle
TOL_SEP = 1e-9        # minimal pairwise root separation
TOL_IDENTITY = 1e-9   # default residual for the polynomial identities

TWO_PI = 2.0 * math.pi


class ConfigurationError(ValueError):
    """Invalid boundary points or weight sequence."""


class DomainError(ValueError):
    """Evaluation point outside the natural domain of the space."""


class TruncationError(RuntimeError):
    """A certified truncation error could not be brought below tolerance."""


class IllConditionedError(RuntimeError):
    """A linear solve exceeded the configured condition-number cap."""


class SearchFailureError(RuntimeError):
    """Exhaustive search hit its cap; carries the best candidate found."""

    def __init__(self, message, best=None, best_error=None):
        super().__init__(message)
        self.best = best
        self.best_error = best_error


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class Poly:
    """Dense complex polynomial, ascending-degree coefficients.

    Trailing (near-)zero coefficients are trimmed on construction so that the
    leading stored coefficient is nonzero; the zero polynomial keeps a single
    zero coefficient and reports degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, trim: bool = True):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).copy()
        if trim:
            nz = np.nonzero(c)[0]
            c = c[: nz[-1] + 1] if nz.size else c[:1] * 0.0
        self.coeffs = c
        self.coeffs.setflags(write=False)

    @property
    def degree(self) -> int:
        if self.coeffs.size == 1 and self.coeffs[0] == 0:
            return -1
        return self.coeffs.size - 1

    def __call__(self, x):
        """Horner evaluation; broadcasts over array arguments."""
        x = np.asarray(x, dtype=complex)
        acc = np.full(x.shape, self.coeffs[-1], dtype=complex)
        for c in self.coeffs[-2::-1]:
            acc = acc * x + c
        return acc if acc.shape else complex(acc)

    def derivative(self) -> "Poly":
        if self.coeffs.size <= 1:
            return Poly([0.0])
        k = np.arange(1, self.coeffs.size)
        return Poly(self.coeffs[1:] * k)

    def scale_argument(self, s) -> "Poly":
        """Coefficients of p(s*x)."""
        return Poly(self.coeffs * (complex(s) ** np.arange(self.coeffs.size)), trim=False)

    def __mul__(self, other):
        if isinstance(other, Poly):
            return Poly(np.convolve(self.coeffs, other.coeffs))
        return Poly(self.coeffs * complex(other), trim=False)

    __rmul__ = __mul__

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if a.size < b.size:
            a, b = b, a
        out = a.copy()
        out[: b.size] += b
        return Poly(out)

    def __sub__(self, other):
        return self + (other * (-1.0))

    def __repr__(self):
        return f"Poly({list(self.coeffs)})"


def eval_poly(poly: Poly, x) -> complex:
    """Evaluate ``poly`` at ``x`` by Horner's scheme."""
    return poly(x)


# ---------------------------------------------------------------------------
# boundary configuration
# ---------------------------------------------------------------------------

_EXACT_QUARTERS = {
    Fraction(0): 1.0 + 0.0j,
    Fraction(1, 4): 1.0j,
    Fraction(1, 2): -1.0 + 0.0j,
    Fraction(3, 4): -1.0j,
}


def _unit_from_fraction(q: Fraction) -> complex:
    q = q % 1
    exact = _EXACT_QUARTERS.get(q)
    if exact is not None:
        return exact
    return cmath.exp(2j * math.pi * q.numerator / q.denominator)


@dataclass(frozen=True)
class BoundaryConfig:
    """The distinct unimodular points z_1..z_J and their conjugates.

    ``angles`` keeps the exact rational angle fractions (z_j = exp(2*pi*i*q_j))
    when the configuration was built from them; several downstream searches
    exploit that exactness.
    """

    roots: tuple
    angles: Optional[tuple] = None

    def __post_init__(self):
        roots = tuple(complex(z) for z in self.roots)
        object.__setattr__(self, "roots", roots)
        if not roots:
            raise ConfigurationError("at least one boundary point is required")
        for z in roots:
            if abs(abs(z) - 1.0) > TOL_UNIT:
                raise ConfigurationError(f"point {z} is not on the unit circle")
        for i in range(len(roots)):
            for k in range(i + 1, len(roots)):
                if abs(roots[i] - roots[k]) <= TOL_SEP:
                    raise ConfigurationError(
                        f"points {roots[i]} and {roots[k]} are not separated"
                    )
        if self.angles is not None:
            angles = tuple(Fraction(q) for q in self.angles)
            if len(angles) != len(roots):
                raise ConfigurationError("angles and roots length mismatch")
            object.__setattr__(self, "angles", angles)

    @classmethod
    def from_angles(cls, fractions: Iterable) -> "BoundaryConfig":
        """Build from rational angle fractions q_j, z_j = exp(2*pi*i*q_j)."""
        qs = tuple(Fraction(q) for q in fractions)
        return cls(tuple(_unit_from_fraction(q) for q in qs), qs)

    @classmethod
    def from_points(cls, points: Iterable[complex]) -> "BoundaryConfig":
        pts = tuple(complex(z) for z in points)
        for z in pts:
            if z == 0 or abs(abs(z) - 1.0) > TOL_UNIT:
                raise ConfigurationError(f"point {z} is not on the unit circle")
        # snap the in-tolerance points exactly onto the circle
        return cls(tuple(z / abs(z) for z in pts))

    @property
    def J(self) -> int:
        return len(self.roots)

    @property
    def conjugates(self) -> tuple:
        """w_j = conj(z_j) = 1/z_j."""
        return tuple(z.conjugate() for z in self.roots)


def root_powers(cfg: BoundaryConfig, j: int, exponents) -> np.ndarray:
    """z_j^m for an array of (possibly negative) integer exponents.

    Rational angles are multiplied in exact integer arithmetic before the
    single complex exponential, avoiding the phase drift of repeated
    floating-point powers.
    """
    m = np.asarray(exponents, dtype=np.int64)
    if cfg.angles is not None:
        q = cfg.angles[j]
        num, den = q.numerator % q.denominator, q.denominator
        if den <= (1 << 30):
            frac = ((m % den) * (num % den)) % den
            return np.exp(2j * np.pi * frac / den)
    theta = np.angle(cfg.roots[j])
    return np.exp(1j * theta * m)


def phi_from_roots(cfg: BoundaryConfig) -> Poly:
    """phi(z) = prod_j (1 - w_j z); constant term 1, degree exactly J."""
    coeffs = np.array([1.0 + 0j])
    for w in cfg.conjugates:
        coeffs = np.convolve(coeffs, np.array([1.0, -w]))
    return Poly(coeffs, trim=False)


def phi_reduced(cfg: BoundaryConfig, j: int) -> Poly:
    """prod_{k != j} (1 - w_k z): phi with the j-th factor removed."""
    coeffs = np.array([1.0 + 0j])
    for k, w in enumerate(cfg.conjugates):
        if k != j:
            coeffs = np.convolve(coeffs, np.array([1.0, -w]))
    return Poly(coeffs, trim=False)


def beta_coefficients(cfg: BoundaryConfig) -> np.ndarray:
    """Coefficient array of phi, length J+1."""
    return phi_from_roots(cfg).coeffs


# ---------------------------------------------------------------------------
# symmetric-function machinery
# ---------------------------------------------------------------------------

def homogeneous_symmetric(k: int, points: Sequence[complex]) -> complex:
    """Complete homogeneous symmetric polynomial h_k of the given points.

    h_k = 0 for k < 0 and h_0 = 1.  Computed through the O(k*J) recurrence
    h_k = -sum_{i>=1} gamma_i h_{k-i} with gamma the coefficients of
    prod_j (1 - x_j t); the brute-force monomial sum lives only in the tests.
    """
    if k < 0:
        return 0.0 + 0j
    gamma = np.array([1.0 + 0j])
    for x in points:
        gamma = np.convolve(gamma, np.array([1.0, -complex(x)]))
    h = np.zeros(k + 1, dtype=complex)
    h[0] = 1.0
    for m in range(1, k + 1):
        acc = 0.0 + 0j
        for i in range(1, min(m, len(gamma) - 1) + 1):
            acc -= gamma[i] * h[m - i]
        h[m] = acc
    return complex(h[k])


def mu_weights(cfg: BoundaryConfig) -> list:
    """mu_j = prod_{k != j} (w_j - w_k); the empty product (J=1) is 1."""
    w = cfg.conjugates
    out = []
    for j in range(cfg.J):
        prod = 1.0 + 0j
        for k in range(cfg.J):
            if k != j:
                d = w[j] - w[k]
                if abs(d) <= TOL_SEP:
                    raise ConfigurationError("conjugate points are not separated")
                prod *= d
        out.append(prod)
    return out


def louck_power_sum(m: int, cfg: BoundaryConfig) -> complex:
    """sum_j w_j^m / mu_j; equals h_{m-J+1}(w_1..w_J) for m >= 0."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    mus = mu_weights(cfg)
    return complex(sum(w ** m / mu for w, mu in zip(cfg.conjugates, mus)))


# ---------------------------------------------------------------------------
# weight sequences
# ---------------------------------------------------------------------------

_HARMONIC = "harmonic"
_POWERLAW = "powerlaw"
_TABLE = "table"


@dataclass(frozen=True)
class WeightSequence:
    """The sequence a_n -> 1 together with its decay-rate metadata.

    Kinds:
      harmonic:  a_n = 1 - p/(n + offset)
      powerlaw:  a_n = 1 - 1/(n + 2)^p
      table:     finite prefix of explicit values, continued by ``tail``
                 (itself a harmonic or powerlaw sequence)

    ``rate_hypothesis`` records whether n*(1 - a_n) -> p holds for this
    sequence: true for harmonic by construction and for powerlaw only at
    p = 1.  Several asymptotic diagnostics are only meaningful under it.
    """

    kind: str
    p: float
    offset: float = 2.0
    values: tuple = ()
    tail: Optional["WeightSequence"] = None

    def __post_init__(self):
        if self.kind not in (_HARMONIC, _POWERLAW, _TABLE):
            raise ConfigurationError(f"unknown weight kind {self.kind!r}")
        if self.kind in (_HARMONIC, _POWERLAW) and not self.p > 0:
            raise ConfigurationError("rate parameter p must be positive")
        if self.kind == _HARMONIC and self.offset <= 0:
            raise ConfigurationError("harmonic offset must be positive")
        if self.kind == _TABLE:
            if self.tail is None or self.tail.kind == _TABLE:
                raise ConfigurationError(
                    "table weights need a harmonic or powerlaw tail rule"
                )
            vals = tuple(complex(v) for v in self.values)
            object.__setattr__(self, "values", vals)
            if any(v == 1.0 for v in vals):
                raise ConfigurationError("1 - a_n must not vanish on the table")
        self._check_convergence()

    @classmethod
    def harmonic(cls, p: float, offset: float = 2.0) -> "WeightSequence":
        return cls(_HARMONIC, float(p), float(offset))

    @classmethod
    def power_law(cls, p: float) -> "WeightSequence":
        return cls(_POWERLAW, float(p))

    @classmethod
    def from_table(cls, values, tail: "WeightSequence") -> "WeightSequence":
        return cls(_TABLE, tail.p, tail.offset if tail.kind == _HARMONIC else 2.0,
                   tuple(values), tail)

    # -- evaluation ---------------------------------------------------------

    def a(self, n):
        """a_n for an integer or integer array."""
        return 1.0 - self.one_minus_a(n)

    def one_minus_a(self, n):
        """1 - a_n computed without cancellation (table prefix excepted)."""
        n_arr = np.atleast_1d(np.asarray(n, dtype=float))
        if self.kind == _HARMONIC:
            out = self.p / (n_arr + self.offset)
        elif self.kind == _POWERLAW:
            out = (n_arr + 2.0) ** (-self.p)
        else:
            out = np.atleast_1d(np.asarray(self.tail.one_minus_a(n_arr)))
            vals = np.asarray(self.values)
            mask = n_arr < len(vals)
            if np.any(mask):
                head = 1.0 - vals[n_arr[mask].astype(int)]
                if np.iscomplexobj(head) and not np.iscomplexobj(out):
                    out = out.astype(complex)
                out[mask] = head
        if np.ndim(n) == 0:
            return complex(out[0]) if np.iscomplexobj(out) else float(out[0])
        return out

    def prefix(self, N: int) -> np.ndarray:
        """Array a_0..a_{N-1}."""
        return self.a(np.arange(N))

    def one_minus_prefix(self, N: int) -> np.ndarray:
        return self.one_minus_a(np.arange(N))

    @property
    def rate_hypothesis(self) -> bool:
        """Whether n*(1 - a_n) -> p holds for this sequence."""
        if self.kind == _HARMONIC:
            return True
        if self.kind == _POWERLAW:
            return self.p == 1.0
        return self.tail.rate_hypothesis

    @property
    def square_summable(self) -> bool:
        """Whether sum |1 - a_n|^2 converges (certifiable kinds only)."""
        if self.kind == _HARMONIC:
            return True
        if self.kind == _POWERLAW:
            return self.p > 0.5
        return self.tail.square_summable

    def _check_convergence(self):
        # sampled sanity check: |1 - a_n| decreasing beyond a small index
        start = 8 if self.kind != _TABLE else max(8, len(self.values))
        probe = np.abs(np.asarray(
            self.one_minus_a(np.arange(start, start + 4096, 128))))
        if np.any(np.diff(probe) > 0) or not probe[-1] < probe[0]:
            raise ConfigurationError("|1 - a_n| does not settle toward 0")
        if np.any(probe == 0):
            raise ConfigurationError("1 - a_n vanishes at a sampled index")

    # -- certified tail bounds ---------------------------------------------

    def sq_tail_bound(self, N: int) -> float:
        """Upper bound for sum_{n >= N} |1 - a_n|^2."""
        return self._power_tail_bound(N, 2)

    def cube_tail_bound(self, N: int) -> float:
        """Upper bound for sum_{n >= N} |1 - a_n|^3."""
        return self._power_tail_bound(N, 3)

    def _power_tail_bound(self, N: int, power: int) -> float:
        if self.kind == _HARMONIC:
            # sum_{n>=N} (n+c)^-q  <  (N-1+c)^(1-q)/(q-1)
            q = power
            return abs(self.p) ** power * (N - 1 + self.offset) ** (1 - q) / (q - 1)
        if self.kind == _POWERLAW:
            q = power * self.p
            if q <= 1.0:
                return math.inf
            return (N + 1.0) ** (1 - q) / (q - 1)
        if N >= len(self.values):
            return self.tail._power_tail_bound(N, power)
        head = float(np.sum(np.abs(
            [1.0 - v for v in self.values[N:]]) ** power))
        return head + self.tail._power_tail_bound(len(self.values), power)

    def sq_tail_exact(self, N: int) -> Optional[float]:
        """sum_{n >= N} (1 - a_n)^2 in closed form, or None if unavailable.

        Only real-valued kinds admit the closed form (trigamma for harmonic,
        Hurwitz zeta for powerlaw with 2p > 1).
        """
        from scipy.special import polygamma, zeta

        if self.kind == _HARMONIC:
            return float(self.p ** 2 * polygamma(1, N + self.offset))
        if self.kind == _POWERLAW:
            if 2 * self.p <= 1:
                return None
            return float(zeta(2 * self.p, N + 2.0))
        if self.tail is None:
            return None
        if N >= len(self.values):
            return self.tail.sq_tail_exact(N)
        tail_part = self.tail.sq_tail_exact(len(self.values))
        if tail_part is None:
            return None
        head = float(np.sum(np.abs([1.0 - v for v in self.values[N:]]) ** 2))
        return head + tail_part

    def decay_factor_sup(self, n0: int, shift: int) -> float:
        """sup_{n >= n0} (n + shift)*|1 - a_n| / p for rate-hypothesis kinds.

        The factor is monotone for harmonic/powerlaw(p=1) weights, so the
        supremum is either the first sample or the limit 1.
        """
        if not self.rate_hypothesis:
            raise ConfigurationError(
                "decay factor defined only when n*(1 - a_n) -> p")
        first = (n0 + shift) * abs(self.one_minus_a(n0)) / self.p
        return max(first, 1.0)
