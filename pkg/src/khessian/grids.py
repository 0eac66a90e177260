"""Regular grids on the cube [-1,1]^n: differences, norm surrogates, file I/O.

Second derivatives use centered stencils at interior points and one-sided
second-order stencils on the boundary faces; mixed derivatives are tensor
products of first-difference operators, so the discrete Hessian is symmetric
exactly.  The CSV format (header ``x1,...,xn,value``, rows lexicographic in
grid indices, shortest-roundtrip floats) is frozen for golden tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

_M_CAP = {2: 257, 3: 65, 4: 33}


def _validate_shape(n: int, m: int) -> None:
    if not 2 <= n <= 4:
        raise DomainError(f"need 2 <= n <= 4, got n={n}")
    if m < 9 or m % 2 == 0:
        raise DomainError(f"points per axis must be odd and >= 9, got m={m}")
    if m > _M_CAP[n]:
        raise DomainError(f"m={m} exceeds the cap {_M_CAP[n]} for n={n}")


@dataclass
class ScalarGrid:
    """Scalar values on the uniform grid over [-1,1]^n with spacing 2/(m-1)."""

    n: int
    m: int
    values: np.ndarray

    def __post_init__(self):
        _validate_shape(self.n, self.m)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.m,) * self.n:
            raise DomainError(
                f"values shape {self.values.shape} != {(self.m,) * self.n}"
            )

    @property
    def h(self) -> float:
        return 2.0 / (self.m - 1)

    @property
    def dirichlet_mask(self) -> np.ndarray:
        return boundary_mask(self.n, self.m)

    @property
    def interior_mask(self) -> np.ndarray:
        return ~boundary_mask(self.n, self.m)

    @classmethod
    def zeros(cls, n: int, m: int) -> "ScalarGrid":
        return cls(n=n, m=m, values=np.zeros((m,) * n))

    def copy(self) -> "ScalarGrid":
        return ScalarGrid(self.n, self.m, self.values.copy())


@lru_cache(maxsize=16)
def boundary_mask(n: int, m: int) -> np.ndarray:
    mask = np.zeros((m,) * n, dtype=bool)
    for axis in range(n):
        sl = [slice(None)] * n
        sl[axis] = 0
        mask[tuple(sl)] = True
        sl[axis] = m - 1
        mask[tuple(sl)] = True
    mask.setflags(write=False)
    return mask


def axis_coords(m: int) -> np.ndarray:
    return np.linspace(-1.0, 1.0, m)


@lru_cache(maxsize=16)
def grid_coords(n: int, m: int) -> np.ndarray:
    """Coordinates of every grid point, shape (m,)*n + (n,)."""
    axes = np.meshgrid(*[axis_coords(m)] * n, indexing="ij")
    out = np.stack(axes, axis=-1)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=32)
def d1_matrix(m: int) -> np.ndarray:
    """First derivative: centered interior, one-sided second order on faces."""
    h = 2.0 / (m - 1)
    d = np.zeros((m, m))
    for i in range(1, m - 1):
        d[i, i - 1] = -0.5 / h
        d[i, i + 1] = 0.5 / h
    d[0, 0], d[0, 1], d[0, 2] = -1.5 / h, 2.0 / h, -0.5 / h
    d[-1, -1], d[-1, -2], d[-1, -3] = 1.5 / h, -2.0 / h, 0.5 / h
    d.setflags(write=False)
    return d


@lru_cache(maxsize=32)
def d2_matrix(m: int) -> np.ndarray:
    """Second derivative: centered interior, one-sided second order on faces."""
    h = 2.0 / (m - 1)
    d = np.zeros((m, m))
    for i in range(1, m - 1):
        d[i, i - 1] = 1.0 / h**2
        d[i, i] = -2.0 / h**2
        d[i, i + 1] = 1.0 / h**2
    d[0, :4] = np.array([2.0, -5.0, 4.0, -1.0]) / h**2
    d[-1, -4:] = np.array([-1.0, 4.0, -5.0, 2.0]) / h**2
    d.setflags(write=False)
    return d


def apply_along_axis(mat: np.ndarray, arr: np.ndarray, axis: int) -> np.ndarray:
    out = np.tensordot(mat, arr, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def hessian_of(grid: ScalarGrid) -> tuple[np.ndarray, np.ndarray]:
    """Discrete Hessian (shape grid + (n,n)) and gradient (grid + (n,))."""
    n, m, w = grid.n, grid.m, grid.values
    d1 = d1_matrix(m)
    d2 = d2_matrix(m)
    firsts = [apply_along_axis(d1, w, a) for a in range(n)]
    grad = np.stack(firsts, axis=-1)
    hess = np.zeros(w.shape + (n, n))
    for a in range(n):
        hess[..., a, a] = apply_along_axis(d2, w, a)
        for b in range(a + 1, n):
            cross = apply_along_axis(d1, firsts[a], b)
            hess[..., a, b] = cross
            hess[..., b, a] = cross
    return hess, grad


@lru_cache(maxsize=8)
def _holder_offsets(n: int, radius: int = 8) -> tuple[tuple[int, ...], ...]:
    """Half of the integer offsets with Euclidean norm in (0, radius].

    For n = 4 the set is thinned to axis and diagonal directions to keep the
    pair sweep affordable.
    """
    offsets = []
    if n <= 3:
        rng = range(-radius, radius + 1)
        grids = np.meshgrid(*[list(rng)] * n, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=-1)
        norms = np.sqrt((pts**2).sum(axis=1))
        keep = (norms > 0) & (norms <= radius)
        pts = pts[keep]
        for p in pts:
            first = next((v for v in p if v != 0), 0)
            if first > 0:
                offsets.append(tuple(int(v) for v in p))
    else:
        for axis in range(n):
            for step in range(1, radius + 1):
                o = [0] * n
                o[axis] = step
                offsets.append(tuple(o))
        stop = int(radius / np.sqrt(n))
        for signs in np.ndindex(*([2] * (n - 1))):
            for step in range(1, stop + 1):
                o = [step] + [step * (1 if s else -1) for s in signs]
                offsets.append(tuple(o))
    return tuple(offsets)


def holder_quotient(values: np.ndarray, h: float, alpha: float,
                    mask: np.ndarray | None = None, radius: int = 8) -> float:
    """max |f(x)-f(z)| / |x-z|^alpha over grid pairs within radius*h.

    When ``mask`` is given, only pairs with both endpoints inside it count.
    """
    n = values.ndim
    m = values.shape[0]
    best = 0.0
    for off in _holder_offsets(n, radius):
        src = tuple(
            slice(max(0, -o), m - max(0, o)) for o in off
        )
        dst = tuple(
            slice(max(0, o), m + min(0, o)) for o in off
        )
        diff = np.abs(values[dst] - values[src])
        if mask is not None:
            pair_ok = mask[dst] & mask[src]
            if not pair_ok.any():
                continue
            diff = diff[pair_ok]
        dist = h * float(np.sqrt(sum(o * o for o in off)))
        q = float(diff.max()) / dist**alpha
        if q > best:
            best = q
    return best


def calpha_surrogate(values: np.ndarray, h: float, alpha: float,
                     mask: np.ndarray | None = None) -> float:
    """Sup norm plus Hoelder quotient, the discrete stand-in for a C^alpha norm."""
    vals = values if mask is None else values[mask]
    return float(np.max(np.abs(vals))) + holder_quotient(values, h, alpha, mask)


def c2alpha_surrogate(grid: ScalarGrid, alpha: float) -> float:
    """Discrete stand-in for a C^{2,alpha} norm.

    Max of |w|, |Dw|, |D^2 w| over the grid plus the largest Hoelder quotient
    among the second-derivative components (pairs within 8h).
    """
    hess, grad = hessian_of(grid)
    sup = max(
        float(np.max(np.abs(grid.values))),
        float(np.max(np.abs(grad))),
        float(np.max(np.abs(hess))),
    )
    quot = 0.0
    n = grid.n
    for a in range(n):
        for b in range(a, n):
            quot = max(quot, holder_quotient(hess[..., a, b], grid.h, alpha))
    return sup + quot


def _fmt(x: float) -> str:
    return repr(float(x))


def write_grid_csv(path, values: np.ndarray, axes: list[np.ndarray]) -> None:
    """Write grid values with per-axis coordinate arrays; format is frozen."""
    n = values.ndim
    header = ",".join(f"x{i + 1}" for i in range(n)) + ",value"
    lines = [header]
    for idx in np.ndindex(*values.shape):
        coords = ",".join(_fmt(axes[d][idx[d]]) for d in range(n))
        lines.append(f"{coords},{_fmt(values[idx])}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_grid_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read back a grid CSV; returns (coords rows, values)."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        n = len(header) - 1
        rows = [line.strip().split(",") for line in fh if line.strip()]
    coords = np.array([[float(v) for v in r[:n]] for r in rows])
    values = np.array([float(r[n]) for r in rows])
    return coords, values


def write_sidecar(path, n: int, m: int, h: float, seed_info: dict) -> None:
    doc = {"n": n, "m": m, "h": h, "seed": seed_info}
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
