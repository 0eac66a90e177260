"""Membership tests for the ellipticity cones of sigma_k and boundary splitting.

The open cone for level k is {lam : sigma_j(lam) > 0, j = 1..k}.  Its boundary
splits into two regimes: points where sigma_k = 0 but sigma_{k+1} < 0 (the
linearized operator stays uniformly elliptic there) and points where every
sigma_j with j >= k vanishes (the degenerate regime).  Three equivalent
membership definitions are implemented so they can be swept against each
other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

import numpy as np

from .errors import CapacityError, DomainError
from .symfun import (
    _sigma_all_raw,
    as_spectrum,
    elem_sym,
    shift_coefficient,
    sigma_km1_row,
)

DEFAULT_TOL = 1e-9

_TILDE_GUARD = 1_000_000


class Region(str, Enum):
    INTERIOR = "Interior"
    BOUNDARY_P1 = "BoundaryP1"
    BOUNDARY_P2 = "BoundaryP2"
    OUTSIDE = "Outside"


@dataclass
class ConeVerdict:
    """Classification of an eigenvalue vector relative to the level-k cone.

    ``sigmas`` holds sigma_0..sigma_{k+1}; ``margin`` is the signed minimum of
    the k defining inequalities sigma_j > 0; ``ellipticity_row`` carries the
    deleted-variable row when the point sits on the uniformly elliptic
    boundary piece.
    """

    kind: Region
    sigmas: list[float]
    margin: float
    ambiguous: bool = False
    ellipticity_row: list[float] | None = None

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind.value,
            "sigmas": self.sigmas,
            "margin": self.margin,
            "ambiguous": self.ambiguous,
        }
        if self.ellipticity_row is not None:
            out["ellipticity_row"] = self.ellipticity_row
        return out


@dataclass
class OrderFacts:
    """Facts about a descending-ordered vector in (the closure of) the cone."""

    p: int
    row_sorted: bool
    row: list[float] = field(default_factory=list)


def in_gamma_k(lam, k: int, tol: float = 0.0):
    """True iff sigma_j(lam) > tol for all j = 1..k.  Broadcasts over batches."""
    arr = as_spectrum(lam)
    n = arr.shape[-1]
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    if tol < 0.0:
        raise DomainError("tol must be nonnegative")
    sig = _sigma_all_raw(arr, k)
    ok = np.all(sig[..., 1:] > tol, axis=-1)
    return bool(ok) if ok.ndim == 0 else ok


def in_garding_cone_sampled(lam, k: int, s_grid: int = 17):
    """Hyperbolicity-cone membership: sigma_k(s*e + lam) > 0 for all s >= 0.

    The exact decision uses the coefficient expansion in s: every coefficient
    C(j,k,n)*sigma_{k-j}(lam) must be nonnegative with sigma_k(lam) > 0.  A
    geometric s-sample is evaluated as a consistency check of the positive
    verdicts.
    """
    arr = as_spectrum(lam)
    n = arr.shape[-1]
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    if s_grid < 2:
        raise DomainError("s_grid must be at least 2")
    sig = _sigma_all_raw(arr, k)
    coeff_ok = np.all(sig[..., :k] >= 0.0, axis=-1) & (sig[..., k] > 0.0)

    # Consistency: a positive coefficient verdict forces positivity at every
    # sampled s (the converse direction cannot be sampled).
    s_max = 1.0 + arr.shape[-1] * max(1.0, float(np.max(np.abs(arr))))
    samples = np.concatenate(
        [[0.0], np.geomspace(1e-6 * s_max, s_max, s_grid - 1)]
    )
    poly = np.zeros(arr.shape[:-1] + (samples.size,))
    for j in range(k + 1):
        poly += shift_coefficient(j, k, n) * np.multiply.outer(
            sig[..., k - j], samples**j
        )
    sampled_ok = np.all(poly > 0.0, axis=-1)
    if np.any(coeff_ok & ~sampled_ok):
        raise AssertionError(
            "coefficient test and sampled hyperbolicity check disagree; "
            "this indicates a bug"
        )
    return bool(coeff_ok) if coeff_ok.ndim == 0 else coeff_ok


def in_gamma_tilde(lam, k: int):
    """Deleted-variable membership: sigma_{k-l} positive after deleting any l
    entries, for l = 0..k."""
    arr = as_spectrum(lam)
    n = arr.shape[-1]
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    cost = sum(math.comb(n, l) for l in range(k + 1))
    if cost > _TILDE_GUARD:
        raise CapacityError(f"deleted-variable sweep needs {cost} subsets")
    ok = np.ones(arr.shape[:-1], dtype=bool)
    for l in range(k):  # l == k gives sigma_0 == 1, trivially positive
        for idx in combinations(range(n), l):
            reduced = np.delete(arr, idx, axis=-1) if idx else arr
            vals = _sigma_all_raw(reduced, k - l)[..., k - l]
            ok &= vals > 0.0
    return bool(ok) if ok.ndim == 0 else ok


def _threshold_distances(sig: np.ndarray, k: int, n: int, tol: float) -> float:
    """Distance of the decision quantities to their classification thresholds."""
    dists = []
    for j in range(1, k):
        dists.append(abs(sig[j] - tol))
        dists.append(abs(sig[j] + tol))
    dists.append(abs(abs(sig[k]) - tol))
    if k + 1 <= n:
        dists.append(abs(sig[k + 1] + tol))
        dists.append(abs(abs(sig[k + 1]) - tol))
    for j in range(k + 2, n + 1):
        dists.append(abs(abs(sig[j]) - tol))
    return min(dists)


def classify_boundary(lam, k: int, tol: float = DEFAULT_TOL) -> ConeVerdict:
    """Classify lam as Interior / BoundaryP2 / BoundaryP1 / Outside at level k.

    The verdict is flagged ``ambiguous`` when some decision quantity lies
    within half a tolerance of a classification threshold, i.e. when a
    tol-sized perturbation could change the answer.
    """
    arr = as_spectrum(lam)
    if arr.ndim != 1:
        raise DomainError("classify_boundary takes a single vector")
    n = arr.shape[-1]
    if not 1 <= k <= n - 1:
        raise DomainError(f"need 1 <= k <= n-1, got k={k}, n={n}")
    if tol < 0.0:
        raise DomainError("tol must be nonnegative")

    sig = _sigma_all_raw(arr, n)
    margin = float(np.min(sig[1 : k + 1]))
    low_ok = bool(np.all(sig[1:k] > tol))

    if low_ok and sig[k] > tol:
        kind = Region.INTERIOR
    elif low_ok and abs(sig[k]) <= tol and sig[k + 1] < -tol:
        kind = Region.BOUNDARY_P2
    elif np.all(sig[1:k] >= -tol) and np.all(np.abs(sig[k:]) <= tol):
        kind = Region.BOUNDARY_P1
    else:
        kind = Region.OUTSIDE

    row = None
    if kind is Region.BOUNDARY_P2:
        row = sigma_km1_row(arr, k)
        if not np.all(row > 0.0):
            raise AssertionError(
                "uniformly elliptic boundary point with a nonpositive "
                "deleted-variable row; this indicates a bug"
            )
        row = [float(v) for v in row]

    ambiguous = bool(_threshold_distances(sig, k, n, tol) < 0.5 * tol)
    return ConeVerdict(
        kind=kind,
        sigmas=[float(v) for v in sig[: k + 2]],
        margin=margin,
        ambiguous=ambiguous,
        ellipticity_row=row,
    )


def garding_inequality_check(lam, mu, k: int, tol: float = 1e-10):
    """Check (grad sigma_k(lam), mu) >= k * sigma_k(lam)^((k-1)/k) * sigma_k(mu)^(1/k).

    Both arguments must lie in the open level-k cone.  Equality holds (up to
    roundoff) when mu == lam, by homogeneity.
    """
    lam = as_spectrum(lam)
    mu = as_spectrum(mu)
    if lam.shape != mu.shape:
        raise DomainError("lam and mu must have matching shapes")
    if not np.all(in_gamma_k(lam, k)) or not np.all(in_gamma_k(mu, k)):
        raise DomainError("both arguments must lie in the open cone")
    lhs = np.sum(sigma_km1_row(lam, k) * mu, axis=-1)
    sk_lam = np.asarray(elem_sym(lam, k))
    sk_mu = np.asarray(elem_sym(mu, k))
    rhs = k * sk_lam ** ((k - 1) / k) * sk_mu ** (1.0 / k)
    ok = lhs >= rhs - tol
    return bool(ok) if ok.ndim == 0 else ok


def garding_slack(lam, mu, k: int):
    """Signed slack of the cone inequality (positive means it holds)."""
    lam = as_spectrum(lam)
    mu = as_spectrum(mu)
    lhs = np.sum(sigma_km1_row(lam, k) * mu, axis=-1)
    sk_lam = np.asarray(elem_sym(lam, k))
    sk_mu = np.asarray(elem_sym(mu, k))
    rhs = k * sk_lam ** ((k - 1) / k) * sk_mu ** (1.0 / k)
    out = np.asarray(lhs - rhs)
    return float(out) if out.ndim == 0 else out


def descending_order_facts(lam, k: int, tol: float = DEFAULT_TOL) -> OrderFacts:
    """Positivity count and row monotonicity for a descending-ordered vector.

    For vectors in the open cone the count of strictly positive entries is at
    least k and the deleted-variable row is nondecreasing; both facts are
    returned for the caller to assert.
    """
    arr = as_spectrum(lam)
    if arr.ndim != 1:
        raise DomainError("descending_order_facts takes a single vector")
    if np.any(np.diff(arr) > 0.0):
        raise DomainError("input must be sorted in descending order")
    row = sigma_km1_row(arr, k)
    scale = max(1.0, float(np.max(np.abs(row))))
    row_sorted = bool(np.all(np.diff(row) >= -1e-12 * scale))
    p = int(np.sum(arr > 0.0))
    return OrderFacts(p=p, row_sorted=row_sorted, row=[float(v) for v in row])
