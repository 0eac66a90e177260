"""Randomized property sweeps over the algebra and cone modules.

Each sweep draws reproducible samples from a seeded generator, checks one
family of identities or memberships, and returns a summary with the first few
counterexamples (if any).  The CLI ``verify`` command and the acceptance test
suite both run these.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cone import (
    garding_slack,
    in_gamma_k,
    in_gamma_tilde,
    in_garding_cone_sampled,
    classify_boundary,
    Region,
)
from .seeds import sample_p2_points
from .symfun import binom, elem_sym, elem_sym_deleted, shift_expand, sigma_all, sigma_km1_row

EQUIV_CONFIGS = ((3, 2), (4, 2), (4, 3), (5, 3))
GARDING_CONFIGS = ((4, 2), (5, 3))
P2_CONFIGS = ((2, 3), (2, 4), (3, 4), (3, 5))

REL_TOL = 1e-12
ABS_FLOOR = 1e-14


@dataclass
class SweepResult:
    name: str
    checked: int
    failures: int
    excluded: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "checked": self.checked,
            "failures": self.failures,
            "excluded": self.excluded,
            "passed": self.passed,
            "counterexamples": self.counterexamples,
        }


def _close(a, b, scale=0.0) -> np.ndarray:
    """Relative closeness against the intrinsic evaluation magnitude.

    ``scale`` is the size of the summed terms (sigma of the absolute
    entries), which keeps the 1e-12 relative bound meaningful for identities
    whose two sides cancel catastrophically.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    bound = np.maximum(np.maximum(np.abs(a), np.abs(b)), scale)
    return np.abs(a - b) <= np.maximum(REL_TOL * bound, ABS_FLOOR)


def _record_failures(result: SweepResult, ok: np.ndarray, samples: np.ndarray,
                     limit: int = 5) -> None:
    bad = np.flatnonzero(~ok)
    result.failures += bad.size
    for i in bad[:limit]:
        if len(result.counterexamples) < limit:
            result.counterexamples.append([float(v) for v in np.atleast_2d(samples)[i]])


def cone_equivalence_sweep(samples: int = 10000, seed: int = 7,
                           tol: float = 1e-9,
                           configs=EQUIV_CONFIGS) -> SweepResult:
    """The three membership definitions agree away from their hypersurfaces."""
    rng = np.random.default_rng(seed)
    result = SweepResult(name="cone-equivalence", checked=0, failures=0)
    for n, k in configs:
        lam = rng.uniform(-3.0, 3.0, size=(samples, n))
        sig = sigma_all(lam, k)
        near = np.any(np.abs(sig[:, 1:]) <= tol, axis=1)
        # Deleted-variable quantities sit on their own hypersurfaces.
        from itertools import combinations

        for l in range(1, k):
            for idx in combinations(range(n), l):
                vals = elem_sym_deleted(lam, k - l, idx)
                near |= np.abs(vals) <= tol
        keep = ~near
        result.excluded += int(near.sum())
        lam_kept = lam[keep]
        if lam_kept.shape[0] == 0:
            continue
        a = in_gamma_k(lam_kept, k)
        b = in_garding_cone_sampled(lam_kept, k)
        c = in_gamma_tilde(lam_kept, k)
        ok = (a == b) & (b == c)
        result.checked += lam_kept.shape[0]
        _record_failures(result, ok, lam_kept)
    return result


def _sample_in_cone(n: int, k: int, count: int,
                    rng: np.random.Generator) -> np.ndarray:
    out = np.empty((0, n))
    while out.shape[0] < count:
        draw = rng.uniform(-3.0, 3.0, size=(4 * count, n))
        inside = in_gamma_k(draw, k)
        out = np.concatenate([out, draw[inside]], axis=0)
    return out[:count]


def garding_inequality_sweep(samples: int = 10000, seed: int = 11,
                             tol: float = 1e-10,
                             configs=GARDING_CONFIGS) -> SweepResult:
    """Cone inequality on random interior pairs, plus the equality case."""
    rng = np.random.default_rng(seed)
    result = SweepResult(name="garding-inequality", checked=0, failures=0)
    for n, k in configs:
        lam = _sample_in_cone(n, k, samples, rng)
        mu = _sample_in_cone(n, k, samples, rng)
        slack = garding_slack(lam, mu, k)
        ok = slack >= -tol
        result.checked += samples
        _record_failures(result, ok, lam)
        eq = np.abs(garding_slack(lam, lam, k)) <= tol
        result.checked += samples
        _record_failures(result, eq, lam)
    return result


def maclaurin_sweep(samples: int = 10000, seed: int = 13,
                    configs=EQUIV_CONFIGS) -> SweepResult:
    """Normalized means are nonincreasing in the order, inside the cone."""
    rng = np.random.default_rng(seed)
    result = SweepResult(name="maclaurin", checked=0, failures=0)
    for n, k in configs:
        lam = _sample_in_cone(n, k, samples, rng)
        sig = sigma_all(lam, k)
        means = np.stack(
            [(sig[:, l] / binom(n, l)) ** (1.0 / l) for l in range(1, k + 1)],
            axis=1,
        )
        scale = np.maximum(1.0, np.abs(means[:, :-1]))
        ok = np.all(
            np.diff(means, axis=1) <= REL_TOL * scale, axis=1
        ) if k > 1 else np.ones(samples, dtype=bool)
        result.checked += samples
        _record_failures(result, ok, lam)
    return result


def identities_sweep(samples: int = 1000, seed: int = 17,
                     n_max: int = 8) -> SweepResult:
    """Recursion, row-sum, shift, and homogeneity identities at 1e-12."""
    rng = np.random.default_rng(seed)
    result = SweepResult(name="identities", checked=0, failures=0)
    for _ in range(samples):
        n = int(rng.integers(2, n_max + 1))
        lam = rng.uniform(-3.0, 3.0, size=n)
        mag = np.abs(lam)
        ok = True
        for k in range(1, n + 1):
            sk = elem_sym(lam, k)
            sk_mag = elem_sym(mag, k)
            # recursion through every deleted index
            for i in range(n):
                lhs = lam[i] * elem_sym_deleted(lam, k - 1, (i,)) + (
                    elem_sym_deleted(lam, k, (i,)) if k <= n - 1 else 0.0
                )
                ok &= bool(_close(sk, lhs, scale=sk_mag))
            row = sigma_km1_row(lam, k)
            ok &= bool(_close(row.sum(), (n - k + 1) * elem_sym(lam, k - 1),
                              scale=(n - k + 1) * elem_sym(mag, k - 1)))
            ok &= bool(_close(float(row @ lam), k * sk, scale=k * sk_mag))
            for eps in (-1.0, -0.1, 0.1, 1.0):
                ok &= bool(_close(shift_expand(lam, k, eps),
                                  elem_sym(lam + eps, k),
                                  scale=elem_sym(mag + abs(eps), k)))
        result.checked += 1
        if not ok:
            result.failures += 1
            if len(result.counterexamples) < 5:
                result.counterexamples.append([float(v) for v in lam])
    return result


def p2_ellipticity_sweep(count: int = 1000, seed: int = 23,
                         configs=P2_CONFIGS) -> SweepResult:
    """Constructed sign-changing boundary points keep a positive row."""
    rng = np.random.default_rng(seed)
    result = SweepResult(name="p2-ellipticity", checked=0, failures=0)
    per = max(1, count // len(configs))
    for k, n in configs:
        pts = sample_p2_points(k, n, per, rng)
        rows = sigma_km1_row(pts, k)
        ok = np.min(rows, axis=1) > 0.0
        for i in range(per):
            verdict = classify_boundary(pts[i], k)
            ok[i] &= verdict.kind is Region.BOUNDARY_P2
        result.checked += per
        _record_failures(result, ok, pts)
    return result


SUITES = {
    "cone-equivalence": cone_equivalence_sweep,
    "garding-inequality": garding_inequality_sweep,
    "maclaurin": maclaurin_sweep,
    "identities": identities_sweep,
    "p2-ellipticity": p2_ellipticity_sweep,
}
