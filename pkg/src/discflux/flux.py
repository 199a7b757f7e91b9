"""Fluxes that jump at the origin: f(x, w) = f_l(w) for x <= 0, f_r(w) for x > 0.

Fixtures are polynomials in w so that derivatives, Lipschitz constants and
sonic points (zeros of f') are exact.  ``MollifiedFlux`` is the smoothed
family f^d(x, u) = (u - 1 + H^d(x))^2 / 2 built on the shifted Burgers pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ParameterError, UnsupportedFluxError
from .grid import Grid

ENDPOINT_TOL = 1e-12
SAMPLES_PER_UNIT = 1000


@dataclass(frozen=True)
class Flux:
    """Left/right flux pair with derivatives and a Lipschitz bound on [0, 1]."""

    f_l: Callable
    f_r: Callable
    df_l: Callable
    df_r: Callable
    L: float
    name: str = "custom"
    tags: tuple = ()
    poly_l: Polynomial | None = field(default=None, repr=False)
    poly_r: Polynomial | None = field(default=None, repr=False)

    @classmethod
    def polynomial(cls, coeffs_l, coeffs_r, name="polynomial", L=None, tags=()):
        """Build a flux from ascending coefficient lists (c0 + c1 w + ...).

        L defaults to the exact max of |f'| over [0, 1] for both sides.
        """
        p_l, p_r = Polynomial(coeffs_l), Polynomial(coeffs_r)
        if L is None:
            L = max(_poly_lipschitz(p_l), _poly_lipschitz(p_r))
        return cls(
            f_l=p_l,
            f_r=p_r,
            df_l=p_l.deriv(),
            df_r=p_r.deriv(),
            L=float(L),
            name=name,
            tags=tuple(tags),
            poly_l=p_l,
            poly_r=p_r,
        )

    def with_lipschitz(self, L: float) -> "Flux":
        return replace(self, L=float(L))

    # evaluation on a grid: cells left of the face at 0 use f_l
    def cell_flux(self, grid: Grid, u: np.ndarray) -> np.ndarray:
        n = grid.n_left
        out = np.empty_like(u, dtype=float)
        out[:n] = self.f_l(u[:n])
        out[n:] = self.f_r(u[n:])
        return out

    def cell_dflux(self, grid: Grid, u: np.ndarray) -> np.ndarray:
        n = grid.n_left
        out = np.empty_like(u, dtype=float)
        out[:n] = self.df_l(u[:n])
        out[n:] = self.df_r(u[n:])
        return out

    def side(self, which: str):
        """(f, df, polynomial-or-None) for side 'l' or 'r'."""
        if which == "l":
            return self.f_l, self.df_l, self.poly_l
        return self.f_r, self.df_r, self.poly_r

    @property
    def is_f1(self) -> bool:
        return "f0-only" not in self.tags


def _poly_lipschitz(p: Polynomial, lo=0.0, hi=1.0) -> float:
    dp = p.deriv()
    pts = [lo, hi]
    if dp.degree() >= 2:
        for r in dp.deriv().roots():
            if abs(r.imag) < 1e-12 and lo <= r.real <= hi:
                pts.append(r.real)
    return float(np.max(np.abs(dp(np.array(pts)))))


def eval(flux, x, w):
    """f(x, w): f_l(w) where x <= 0, f_r(w) where x > 0."""
    if isinstance(flux, MollifiedFlux):
        return flux.eval(x, w)
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    out = np.where(x <= 0, flux.f_l(w), flux.f_r(w))
    return float(out) if out.ndim == 0 else out


@dataclass
class ClauseResult:
    name: str
    passed: bool
    worst: float
    location: tuple
    detail: str = ""


@dataclass
class ValidationReport:
    flux_name: str
    clauses: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def clause(self, name: str) -> ClauseResult:
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "flux": self.flux_name,
            "passed": self.passed,
            "clauses": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "worst": c.worst,
                    "location": list(c.location),
                    "detail": c.detail,
                }
                for c in self.clauses
            ],
        }


def validate(flux: Flux) -> ValidationReport:
    """Sampled checks of the Lipschitz bound and the endpoint conditions.

    Lipschitz: all pairs of a 1001-point mesh of [0, 1] on each side.
    Endpoints: f_l(0) = f_r(0) = 0 and f_l(1) = f_r(1) to 1e-12.
    """
    w = np.linspace(0.0, 1.0, SAMPLES_PER_UNIT + 1)
    clauses = []
    for side, f in (("l", flux.f_l), ("r", flux.f_r)):
        fw = f(w)
        dw = np.abs(w[:, None] - w[None, :])
        df = np.abs(fw[:, None] - fw[None, :])
        excess = df - flux.L * dw
        i, j = np.unravel_index(np.argmax(excess), excess.shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dw > 0, df / np.where(dw > 0, dw, 1.0), 0.0)
        clauses.append(
            ClauseResult(
                name=f"lipschitz_{side}",
                passed=bool(excess[i, j] <= 1e-12 * max(1.0, flux.L)),
                worst=float(ratio.max()),
                location=(float(w[i]), float(w[j])),
                detail=f"sampled sup |f_{side}'| vs L={flux.L}",
            )
        )
    f0 = (float(flux.f_l(0.0)), float(flux.f_r(0.0)))
    worst0 = max(abs(f0[0]), abs(f0[1]))
    clauses.append(
        ClauseResult("zero_at_0", worst0 <= ENDPOINT_TOL, worst0, (0.0,), "f_l(0), f_r(0)")
    )
    gap1 = abs(float(flux.f_l(1.0)) - float(flux.f_r(1.0)))
    clauses.append(
        ClauseResult("match_at_1", gap1 <= ENDPOINT_TOL, gap1, (1.0,), "|f_l(1) - f_r(1)|")
    )
    return ValidationReport(flux.name, clauses)


def builtin_fixtures() -> list:
    """The flux pairs used by the examples, each with its exact L on [0, 1]."""
    return [
        # (u-1)^2/2 | u^2/2: f_l(1)=0 but f_r(1)=1/2, so only f0 holds
        Flux.polynomial([0.5, -1.0, 0.5], [0.0, 0.0, 0.5], "burgers_shifted", tags=("f0-only",)),
        Flux.polynomial([0.0, 1.0, -1.0], [0.0, 1.0, -1.0], "traffic"),
        Flux.polynomial([0.0, 1.0, -1.0], [0.0, 2.0, -2.0], "traffic_jump"),
        Flux.polynomial([0.0, 8.0, -8.0], [0.0, 4.0, -4.0], "traffic_84"),
    ]


def get_fixture(name: str) -> Flux:
    for f in builtin_fixtures():
        if f.name == name:
            return f
    raise UnsupportedFluxError(f"unknown flux fixture {name!r}")


def smoothstep(x, delta: float):
    """C^1 transition 3s^2 - 2s^3 with s = (x + delta)/(2 delta) clipped to [0, 1]."""
    s = np.clip((np.asarray(x, dtype=float) + delta) / (2.0 * delta), 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


@dataclass(frozen=True)
class MollifiedFlux:
    """f^d(x, u) = (u - 1 + H^d(x))^2 / 2 with H^d a smoothstep on [-d, d].

    Equals the shifted Burgers pair exactly for |x| >= d.  On a grid the flux
    is evaluated at each cell centre, so it plugs into the viscous solver like
    any other cell-wise flux.
    """

    base: Flux
    delta: float
    name: str = "burgers_shifted_mollified"

    @property
    def L(self) -> float:
        # |u - 1 + H| <= 1 for u, H in [0, 1]
        return 1.0

    @property
    def is_f1(self) -> bool:
        return False

    def profile(self, x):
        return smoothstep(x, self.delta)

    def eval(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        out = 0.5 * (u - 1.0 + self.profile(x)) ** 2
        return float(out) if out.ndim == 0 else out

    def stationary_state(self, x):
        """u^d = 1 - H^d, the zero set of f^d."""
        return 1.0 - self.profile(x)

    def cell_flux(self, grid: Grid, u: np.ndarray) -> np.ndarray:
        return 0.5 * (u - 1.0 + self.profile(grid.x)) ** 2

    def cell_dflux(self, grid: Grid, u: np.ndarray) -> np.ndarray:
        return u - 1.0 + self.profile(grid.x)


def mollify(flux: Flux, delta: float) -> MollifiedFlux:
    if flux.name != "burgers_shifted":
        raise UnsupportedFluxError("mollification is defined for the burgers_shifted pair only")
    if not delta > 0:
        raise ParameterError("delta must be positive")
    return MollifiedFlux(flux, float(delta))
