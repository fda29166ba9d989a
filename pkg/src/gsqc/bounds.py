"""Analytic gap bounds and empirical scaling fits."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundViolationError
from .eigensolve import solve_tipped_levels
from .program import Program, validate_program


def chain_gap(N: int, eps: float = 1.0) -> float:
    """Exact gap of a gate-free qubit: 2*eps*(1 - cos(pi/(N+1)))."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return 2.0 * eps * (1.0 - np.cos(np.pi / (N + 1)))


def upper_bound(program: Program) -> float:
    """Variational upper bound on the spectral gap, valid for the program as given.

    With two-body gates: min over gates of eps/(j (N - j + 1/beta^2)), the
    restricted-space first excited level (reduces to eps/(j(N-j+1)) untipped).
    Gate-free programs return the exact single-qubit gap instead.
    """
    validate_program(program)
    N, eps, beta = program.num_steps, program.epsilon, program.beta
    gates = [g for g in program.gates if g.kind in ("cnot", "cid")]
    if not gates:
        if beta == 1.0:
            return chain_gap(N, eps)
        levels = solve_tipped_levels(N, eps, beta)
        return float(levels[levels > 1e-9 * eps][0])
    return min(eps / (g.row * (N - g.row + 1.0 / beta ** 2)) for g in gates)


def tipped_upper_scale(program: Program) -> float:
    """Order-of-magnitude tipped bound eps/((N+1)(N + 1/beta^2))."""
    N, eps, beta = program.num_steps, program.epsilon, program.beta
    return eps / ((N + 1) * (N + 1.0 / beta ** 2))


@dataclass
class ScalingFit:
    exponent: float
    constant: float
    max_residual: float


def scaling_fit(samples) -> ScalingFit:
    """Least-squares fit gap ~ constant * (N+1)^exponent from (N, gap) pairs."""
    samples = list(samples)
    if len(samples) < 4:
        raise ValueError(f"need at least 4 samples, got {len(samples)}")
    gaps = np.array([g for _, g in samples], dtype=float)
    if np.any(gaps <= 0):
        raise ValueError("all gaps must be positive")
    x = np.log(np.array([n + 1.0 for n, _ in samples]))
    y = np.log(gaps)
    slope, intercept = np.polyfit(x, y, 1)
    resid = np.max(np.abs(y - (slope * x + intercept)))
    return ScalingFit(exponent=float(slope), constant=float(np.exp(intercept)),
                      max_residual=float(resid))


@dataclass
class GapBounds:
    """Bound report for one program instance."""

    gap: float
    upper: float
    tipped_upper_scale: float
    alpha_empirical: float      # gap * (N+1)^4, the lower-bound-form constant
    lower_form: float           # alpha_empirical / (N+1)^4 == gap, kept for CSV symmetry

    def satisfied(self) -> bool:
        return 0.0 <= self.gap <= self.upper * (1.0 + 1e-12) + 1e-12


def check_bounds(program: Program, gap: float, alpha_floor: float | None = None) -> GapBounds:
    """Assert gap <= variational upper bound; record the empirical alpha constant.

    A violated upper bound signals a broken gate-term construction and raises
    BoundViolationError.  alpha_floor, when given (golden family minimum),
    must also be respected.
    """
    if gap < 0:
        raise ValueError(f"gap must be >= 0, got {gap!r}")
    ub = upper_bound(program)
    N = program.num_steps
    alpha = gap * (N + 1) ** 4
    bounds = GapBounds(gap=gap, upper=ub, tipped_upper_scale=tipped_upper_scale(program),
                       alpha_empirical=alpha, lower_form=alpha / (N + 1) ** 4)
    if not bounds.satisfied():
        raise BoundViolationError(
            f"measured gap {gap:.6e} exceeds variational upper bound {ub:.6e} "
            f"(N={N}, gates={[(g.kind, g.row) for g in program.gates if g.kind != 'single']})")
    if alpha_floor is not None and alpha < alpha_floor:
        raise BoundViolationError(
            f"empirical alpha {alpha:.6e} below recorded family floor {alpha_floor:.6e}")
    return bounds
