"""Problem configuration: a single JSON document with nested sections."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import DomainError
from .rhs import RhsSpec


@dataclass
class ProblemConfig:
    n: int
    k: int
    alpha: float = 0.5
    rhs: dict | str = field(default_factory=dict)
    m: int = 17
    tol_lin: float = 1e-10
    tol_newton: float = 1e-9
    max_iter: int = 12
    l: int | str | None = None
    out_dir: str = "out"
    emit_plots_csv: bool = False
    rng_seed: int = 0

    def validate(self) -> None:
        if not 2 <= self.k <= self.n - 1:
            raise DomainError(f"need 2 <= k <= n-1, got k={self.k}, n={self.n}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"need 0 < alpha < 1, got {self.alpha}")
        if self.tol_lin <= 0.0 or self.tol_newton <= 0.0:
            raise DomainError("tolerances must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")
        if self.m < 9 or self.m % 2 == 0:
            raise DomainError(f"m must be odd and >= 9, got {self.m}")
        from .grids import _validate_shape

        _validate_shape(self.n, self.m)
        if self.l is not None and self.l != "full":
            if not isinstance(self.l, int) or not 1 <= self.l <= self.n - self.k + 1:
                raise DomainError(f"invalid convexity level request l={self.l!r}")

    def build_rhs(self) -> RhsSpec:
        from .presets import named_rhs

        if isinstance(self.rhs, str):
            spec = named_rhs(self.rhs, self.n, self.alpha)
        else:
            spec = RhsSpec.from_dict(self.n, self.rhs)
            spec.alpha = self.alpha
        return spec

    @classmethod
    def from_dict(cls, doc: dict) -> "ProblemConfig":
        grid = doc.get("grid", {})
        solver = doc.get("solver", {})
        output = doc.get("output", {})
        cfg = cls(
            n=int(doc["n"]),
            k=int(doc["k"]),
            alpha=float(doc.get("alpha", 0.5)),
            rhs=doc.get("rhs", {}),
            m=int(grid.get("m", 17)),
            tol_lin=float(solver.get("tol_lin", 1e-10)),
            tol_newton=float(solver.get("tol_newton", 1e-9)),
            max_iter=int(solver.get("max_iter", 12)),
            l=doc.get("l"),
            out_dir=str(output.get("directory", "out")),
            emit_plots_csv=bool(output.get("emit_plots_csv", False)),
            rng_seed=int(doc.get("rng_seed", 0)),
        )
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "alpha": self.alpha,
            "rhs": self.rhs,
            "grid": {"m": self.m},
            "solver": {
                "tol_lin": self.tol_lin,
                "tol_newton": self.tol_newton,
                "max_iter": self.max_iter,
            },
            "l": self.l,
            "output": {
                "directory": self.out_dir,
                "emit_plots_csv": self.emit_plots_csv,
            },
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_json_file(cls, path) -> "ProblemConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)
