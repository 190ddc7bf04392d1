"""Picard iteration for the quadratic constraint fixed point.

The correction x = (h1, pi1) solves x = S Phi(seed + x).  Plain
iteration from x0 = 0 keeps the empirical contraction ratio visible:
each step's update norm divided by the previous one estimates the
Lipschitz constant of S Phi on the ball, which scales like the seed
amplitude.  Divergence and ball violations raise typed errors instead
of looping silently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constraints import HPiData
from .errors import BallViolationError, DivergenceError, SolverError
from .fields import GridSpec, SymTensorField


@dataclass(frozen=True)
class SolveConfig:
    tol: float = 1e-8
    max_iter: int = 40
    ball_radius: float | None = None
    guard: float = 0.95

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tolerance must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not 0 < self.guard <= 1.0:
            raise ValueError(f"divergence guard must lie in (0, 1], got {self.guard}")
        if self.ball_radius is not None and not self.ball_radius >= 0:
            raise ValueError("ball_radius must be nonnegative")


@dataclass
class SolveState:
    iterate: HPiData
    history: list = field(default_factory=list)
    converged: bool = False

    def history_columns(self):
        """(iter, update_norm, phi_norm, ratio) rows for CSV emission."""
        return [(rec["iter"], rec["update_norm"], rec["phi_norm"], rec["ratio"])
                for rec in self.history]


def hp_zero(grid: GridSpec) -> HPiData:
    z = np.zeros((6,) + (grid.n,) * 3)
    return HPiData(SymTensorField(grid, z), SymTensorField(grid, z.copy()))


def hp_add(a: HPiData, b: HPiData) -> HPiData:
    return HPiData(
        SymTensorField(a.grid, a.h.values + b.h.values),
        SymTensorField(a.grid, a.pi.values + b.pi.values),
    )


def hp_sub(a: HPiData, b: HPiData) -> HPiData:
    return HPiData(
        SymTensorField(a.grid, a.h.values - b.h.values),
        SymTensorField(a.grid, a.pi.values - b.pi.values),
    )


def _l2_pair(hp: HPiData) -> float:
    return float(np.sqrt(hp.h.l2() ** 2 + hp.pi.l2() ** 2))


def solve(seed: HPiData, S, Phi, cfg: SolveConfig = SolveConfig(), norm=None) -> SolveState:
    """Iterate x <- S Phi(seed + x) from x = 0 until the update stalls.

    S maps a (scalar, vector) source pair to an HPiData correction; Phi
    maps HPiData to the quadratic-remainder source pair.  norm is the
    stopping gauge (defaults to the plain L2 product norm; the CLI wires
    in the weighted b-norm).  Raises DivergenceError after three
    consecutive contraction ratios at or above the guard, and
    BallViolationError if an iterate's norm exceeds the seed's; both
    carry the partial SolveState on a `state` attribute.
    """
    gauge = norm if norm is not None else _l2_pair
    radius = cfg.ball_radius if cfg.ball_radius is not None else gauge(seed)
    x = hp_zero(seed.grid)
    state = SolveState(iterate=x)
    prev_update = None
    hot_streak = 0
    for it in range(1, cfg.max_iter + 1):
        f, F = Phi(hp_add(seed, x))
        phi_norm = float(np.sqrt(f.l2() ** 2 + F.l2() ** 2))
        xn = S(f, F)
        if not isinstance(xn, HPiData):
            xn = HPiData(*xn)
        update = gauge(hp_sub(xn, x))
        xnorm = gauge(xn)
        ratio = update / prev_update if prev_update not in (None, 0.0) else float("nan")
        state.history.append({
            "iter": it,
            "update_norm": update,
            "phi_norm": phi_norm,
            "ratio": ratio,
        })
        if xnorm > radius * (1.0 + 1e-12):
            err = BallViolationError(
                f"iterate {it} has norm {xnorm:.6e}, outside the ball of radius "
                f"{radius:.6e} spanned by the seed"
            )
            err.state = state
            raise err
        x = xn
        state.iterate = x
        if update <= cfg.tol * max(xnorm, 1e-300):
            state.converged = True
            break
        if np.isfinite(ratio) and ratio >= cfg.guard:
            hot_streak += 1
            if hot_streak >= 3:
                err = DivergenceError(
                    f"contraction ratio held at {ratio:.3f} >= {cfg.guard} for three "
                    "consecutive iterations; the amplitude eps0 is too large for "
                    "the fixed point to contract, rerun with a smaller eps0"
                )
                err.state = state
                raise err
        else:
            hot_streak = 0
        prev_update = update
    return state


def estimate_contraction(state: SolveState) -> float:
    """Largest successive update-norm ratio observed during the solve."""
    ratios = [rec["ratio"] for rec in state.history if np.isfinite(rec["ratio"])]
    if not ratios:
        raise SolverError(
            "contraction estimate needs at least two recorded iterations"
        )
    return float(max(ratios))
