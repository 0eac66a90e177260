"""Polynomial right-hand sides f(y, u, p) with exact derivatives.

Total degree in y is capped at 4 and joint degree in (u, p) at 2, which keeps
every first and second partial in (u, p) available in closed form.  A grid-
tabulated variant is provided for manufactured-solution work, where f is a
pure function of position known only at the grid points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class RhsTerm:
    """coeff * prod y_i^y_pow[i] * u^u_pow * prod p_i^p_pow[i]."""

    coeff: float
    y_pow: tuple[int, ...]
    u_pow: int = 0
    p_pow: tuple[int, ...] = ()


def _monomial(base: np.ndarray, powers: tuple[int, ...]) -> np.ndarray:
    out = np.ones(base.shape[:-1])
    for i, e in enumerate(powers):
        if e:
            out = out * base[..., i] ** e
    return out


@dataclass
class RhsSpec:
    """Polynomial f(y, u, p) on the box |u| <= box, |p| <= box."""

    n: int
    terms: list[RhsTerm] = field(default_factory=list)
    alpha: float = 0.5
    box: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"need 0 < alpha < 1, got {self.alpha}")
        norm_terms = []
        for t in self.terms:
            y_pow = tuple(t.y_pow) + (0,) * (self.n - len(t.y_pow))
            p_pow = tuple(t.p_pow) + (0,) * (self.n - len(t.p_pow))
            if len(y_pow) != self.n or len(p_pow) != self.n:
                raise DomainError("term exponent tuples longer than n")
            if sum(y_pow) > 4:
                raise DomainError("total degree in y exceeds 4")
            if t.u_pow + sum(p_pow) > 2:
                raise DomainError("joint degree in (u, p) exceeds 2")
            norm_terms.append(RhsTerm(float(t.coeff), y_pow, t.u_pow, p_pow))
        self.terms = norm_terms

    # -- construction helpers -------------------------------------------------

    @classmethod
    def constant(cls, n: int, value: float, alpha: float = 0.5) -> "RhsSpec":
        terms = [] if value == 0.0 else [RhsTerm(value, (0,) * n)]
        return cls(n=n, terms=terms, alpha=alpha)

    @classmethod
    def from_dict(cls, n: int, doc: dict) -> "RhsSpec":
        terms = [
            RhsTerm(
                coeff=float(t["coeff"]),
                y_pow=tuple(t.get("y", [0] * n)),
                u_pow=int(t.get("u", 0)),
                p_pow=tuple(t.get("p", [0] * n)),
            )
            for t in doc.get("terms", [])
        ]
        return cls(
            n=n,
            terms=terms,
            alpha=float(doc.get("alpha", 0.5)),
            box=float(doc.get("box", 1.0)),
        )

    def to_dict(self) -> dict:
        return {
            "terms": [
                {
                    "coeff": t.coeff,
                    "y": list(t.y_pow),
                    "u": t.u_pow,
                    "p": list(t.p_pow),
                }
                for t in self.terms
            ],
            "alpha": self.alpha,
            "box": self.box,
        }

    # -- evaluation ------------------------------------------------------------

    def value(self, y: np.ndarray, u: np.ndarray, p: np.ndarray) -> np.ndarray:
        out = np.zeros(np.asarray(u).shape)
        for t in self.terms:
            out = out + (
                t.coeff
                * _monomial(y, t.y_pow)
                * np.asarray(u) ** t.u_pow
                * _monomial(p, t.p_pow)
            )
        return out

    def _du_terms(self) -> list[RhsTerm]:
        return [
            RhsTerm(t.coeff * t.u_pow, t.y_pow, t.u_pow - 1, t.p_pow)
            for t in self.terms
            if t.u_pow > 0
        ]

    def _dpi_terms(self, i: int) -> list[RhsTerm]:
        out = []
        for t in self.terms:
            e = t.p_pow[i]
            if e > 0:
                p_pow = list(t.p_pow)
                p_pow[i] = e - 1
                out.append(RhsTerm(t.coeff * e, t.y_pow, t.u_pow, tuple(p_pow)))
        return out

    @staticmethod
    def _eval_terms(terms, y, u, p) -> np.ndarray:
        out = np.zeros(np.asarray(u).shape)
        for t in terms:
            out = out + (
                t.coeff
                * _monomial(y, t.y_pow)
                * np.asarray(u) ** t.u_pow
                * _monomial(p, t.p_pow)
            )
        return out

    def du(self, y, u, p) -> np.ndarray:
        return self._eval_terms(self._du_terms(), y, u, p)

    def dp(self, y, u, p) -> np.ndarray:
        cols = [self._eval_terms(self._dpi_terms(i), y, u, p) for i in range(self.n)]
        return np.stack(cols, axis=-1)

    def duu(self, y, u, p) -> np.ndarray:
        sub = RhsSpec(self.n, self._du_terms(), self.alpha, self.box)
        return sub.du(y, u, p)

    def dup(self, y, u, p) -> np.ndarray:
        sub = RhsSpec(self.n, self._du_terms(), self.alpha, self.box)
        return sub.dp(y, u, p)

    def dpp(self, y, u, p) -> np.ndarray:
        rows = []
        for i in range(self.n):
            sub = RhsSpec(self.n, self._dpi_terms(i), self.alpha, self.box)
            rows.append(sub.dp(y, u, p))
        return np.stack(rows, axis=-1)

    def value_at_origin(self) -> float:
        zero = np.zeros(self.n)
        return float(self.value(zero, np.asarray(0.0), zero))

    def coeff_bound(self) -> float:
        """Crude bound for the size of f and its (u,p)-derivatives on the box."""
        return float(sum(abs(t.coeff) for t in self.terms))


@dataclass
class TabulatedRhs:
    """Position-only right-hand side known at the grid points.

    Used to manufacture problems whose exact solution is prescribed; ignores
    the (y, u, p) arguments and returns the stored grid values, so it may only
    be evaluated on the full grid it was built for.
    """

    values: np.ndarray
    alpha: float = 0.5
    box: float | None = None

    def value(self, y, u, p) -> np.ndarray:
        return self.values

    def du(self, y, u, p) -> np.ndarray:
        return np.zeros(self.values.shape)

    def dp(self, y, u, p) -> np.ndarray:
        n = np.asarray(y).shape[-1]
        return np.zeros(self.values.shape + (n,))

    def value_at_origin(self) -> float:
        center = tuple(s // 2 for s in self.values.shape)
        return float(self.values[center])

    def coeff_bound(self) -> float:
        return float(np.max(np.abs(self.values)))
