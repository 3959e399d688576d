"""Unsteady 2-D incompressible vorticity transport with a substructural source.

Vorticity-streamfunction formulation on a periodic square: the velocity is
``v = (d psi/d y, -d psi/d x)`` with ``lap(psi) = -omega`` solved exactly
(to rounding) by FFT diagonalization of the compact 5-point Laplacian, so
incompressibility holds by construction.  The vorticity equation is

    d omega / dt = -(v.grad) omega - iota*curl(div T)   (iota == 1 here)

with the dyadic substructural stress ``T_ij = sum_a (grad nu)^a_i *
(dphi/dgrad nu)^a_j``.  The source vanishes exactly when ``div T`` is a
gradient (equivalently when a tensor potential exists); otherwise the flow
exchanges energy with the substructure and neither enstrophy nor the
vorticity extrema are conserved.

The advection term is discretized with the Arakawa 9-point Jacobian, whose
discrete conservation of energy and enstrophy keeps the conserving-case
drift purely time-integration (RK4) sized; a naive central product form
would leak enstrophy at a rate set by the spatial resolution, drowning the
time-step signal.  Time stepping is classical explicit RK4.

The integrator owns its state single-threaded per run; the per-cell right
side is data-parallel and independent runs can execute concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .fieldcalc import (
    Grid,
    OrderField,
    PERIODIC,
    ScalarField,
    TensorField,
    VectorField,
    curl_vector,
    div_tensor,
    l2_norm,
    linf_norm,
    order_grad,
    order_second_grad,
    refinement_study,
    require_same_grid,
)
from .models import ComplexFluidModel, ModelError

POISSON_TOL = 1e-10

FROZEN = "frozen"
ADVECTED = "advected"


class TransportError(ValueError):
    """Invalid transport state or configuration."""


class CFLError(RuntimeError):
    """Time step violates the advective stability bound."""


class PoissonError(RuntimeError):
    """Streamfunction solve left a residual above tolerance."""


def _require_periodic_square(grid: Grid) -> None:
    if grid.dim != 2:
        raise TransportError("transport runs on 2-D grids")
    if any(b != PERIODIC for b in grid.boundary):
        raise TransportError("transport needs periodic boundaries")
    if grid.extents[0] != grid.extents[1] or grid.spacing[0] != grid.spacing[1]:
        raise TransportError("transport needs a square grid with equal spacing")


def _laplacian_compact(grid: Grid, values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values)
    for a in range(grid.dim):
        h = grid.spacing[a]
        out += (np.roll(values, -1, axis=a) - 2.0 * values + np.roll(values, 1, axis=a)) / (h * h)
    return out


def _poisson_eigenvalues(grid: Grid) -> np.ndarray:
    nx, ny = grid.extents
    hx, hy = grid.spacing
    kx = np.arange(nx)
    ky = np.arange(ny)
    ex = (2.0 * np.cos(2.0 * np.pi * kx / nx) - 2.0) / (hx * hx)
    ey = (2.0 * np.cos(2.0 * np.pi * ky / ny) - 2.0) / (hy * hy)
    return ex[:, None] + ey[None, :]


def solve_streamfunction(grid: Grid, omega: np.ndarray, tol: float = POISSON_TOL) -> np.ndarray:
    """Zero-mean psi with lap(psi) = -omega on the compact 5-point stencil."""
    lam = _poisson_eigenvalues(grid)
    rhs_hat = np.fft.fft2(-omega)
    psi_hat = np.zeros_like(rhs_hat)
    mask = np.abs(lam) > 1e-14
    psi_hat[mask] = rhs_hat[mask] / lam[mask]
    psi = np.real(np.fft.ifft2(psi_hat))
    residual = np.max(np.abs(_laplacian_compact(grid, psi) + omega))
    if residual > tol:
        raise PoissonError(f"streamfunction residual {residual:.3e} exceeds {tol:.1e}")
    return psi


def _velocity(grid: Grid, psi: np.ndarray) -> np.ndarray:
    hx, hy = grid.spacing
    vx = (np.roll(psi, -1, axis=1) - np.roll(psi, 1, axis=1)) / (2.0 * hy)
    vy = -(np.roll(psi, -1, axis=0) - np.roll(psi, 1, axis=0)) / (2.0 * hx)
    return np.stack([vx, vy], axis=-1)


def _arakawa(grid: Grid, psi: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """Nine-point Jacobian J(psi, zeta) = psi_x zeta_y - psi_y zeta_x."""
    hx, hy = grid.spacing
    pe = np.roll(psi, -1, axis=0)
    pw = np.roll(psi, 1, axis=0)
    pn = np.roll(psi, -1, axis=1)
    ps = np.roll(psi, 1, axis=1)
    pne = np.roll(pn, -1, axis=0)
    pnw = np.roll(pn, 1, axis=0)
    pse = np.roll(ps, -1, axis=0)
    psw = np.roll(ps, 1, axis=0)
    ze = np.roll(zeta, -1, axis=0)
    zw = np.roll(zeta, 1, axis=0)
    zn = np.roll(zeta, -1, axis=1)
    zs = np.roll(zeta, 1, axis=1)
    zne = np.roll(zn, -1, axis=0)
    znw = np.roll(zn, 1, axis=0)
    zse = np.roll(zs, -1, axis=0)
    zsw = np.roll(zs, 1, axis=0)
    j1 = (pe - pw) * (zn - zs) - (pn - ps) * (ze - zw)
    j2 = pe * (zne - zse) - pw * (znw - zsw) - pn * (zne - znw) + ps * (zse - zsw)
    j3 = zn * (pne - pnw) - zs * (pse - psw) - ze * (pne - pse) + zw * (pnw - psw)
    return (j1 + j2 + j3) / (12.0 * hx * hy)


@dataclass(frozen=True)
class TransportState:
    """Vorticity, consistent streamfunction, substructure field and time."""

    omega: ScalarField
    psi: ScalarField
    nu: OrderField
    t: float = 0.0

    def __post_init__(self) -> None:
        grid = require_same_grid(self.omega, self.psi, self.nu)
        _require_periodic_square(grid)
        mean = abs(float(np.mean(self.omega.values)))
        if mean > 1e-10 * (1.0 + float(np.max(np.abs(self.omega.values)))):
            raise TransportError(f"mean vorticity {mean:.3e} violates periodic solvability")

    @classmethod
    def from_vorticity(cls, grid: Grid, omega: np.ndarray, nu: OrderField, t: float = 0.0) -> "TransportState":
        omega = np.asarray(omega, dtype=float)
        mean = abs(float(np.mean(omega)))
        if mean > 1e-10 * (1.0 + float(np.max(np.abs(omega)))):
            raise TransportError(f"mean vorticity {mean:.3e} violates periodic solvability")
        psi = solve_streamfunction(grid, omega)
        return cls(ScalarField(grid, omega), ScalarField(grid, psi), nu, t)

    @property
    def grid(self) -> Grid:
        return self.omega.grid

    def velocity(self) -> VectorField:
        return VectorField(self.grid, _velocity(self.grid, self.psi.values))


@dataclass(frozen=True)
class TransportConfig:
    """Time step, step count, substructure model and nu handling mode."""

    dt: float
    steps: int
    model: ComplexFluidModel
    mode: str = FROZEN
    cfl_limit: float = 0.5
    report_every: int = 10
    poisson_tol: float = POISSON_TOL

    def __post_init__(self) -> None:
        if self.dt <= 0.0 or self.steps < 0:
            raise TransportError("dt must be positive and steps non-negative")
        if self.mode not in (FROZEN, ADVECTED):
            raise TransportError(f"mode must be '{FROZEN}' or '{ADVECTED}'")
        if not (0.0 < self.cfl_limit <= 0.5):
            raise TransportError("cfl_limit must lie in (0, 0.5]")


def substructural_stress(grid: Grid, nu: OrderField, model: ComplexFluidModel) -> TensorField:
    """Dyadic stress T_ij = sum_a (grad nu)^a_i (dphi/dgrad nu)^a_j (iota == 1)."""
    if nu.m != model.m:
        raise ModelError(f"chart dimension mismatch: model m={model.m}, field m={nu.m}")
    gnu = order_grad(nu).values
    p = model.dphi_dgrad_nu(gnu)
    return TensorField(grid, np.einsum("...ai,...aj->...ij", gnu, p))


def transport_rhs(state: TransportState, model: ComplexFluidModel) -> ScalarField:
    """Vorticity source -iota*curl(div T) with iota == 1.

    Exactly zero for uniform nu; O(h^2)-small whenever div T is a gradient.
    """
    grid = state.grid
    te = substructural_stress(grid, state.nu, model)
    return ScalarField(grid, -curl_vector(div_tensor(te)).values)


def stress_divergence_expanded(grid: Grid, nu: OrderField, model: ComplexFluidModel) -> VectorField:
    """Product-rule route for div of the dyadic stress (cross-check).

    ``(grad nu)^T div(P) + P^T gradgrad(nu)`` with ``P = dphi/dgrad nu``;
    agrees with ``div_tensor(substructural_stress(...))`` to O(h^2).
    """
    from .fieldcalc import _diff  # local import keeps the public surface tidy

    gnu = order_grad(nu).values
    p = model.dphi_dgrad_nu(gnu)
    div_p = _diff(grid, p[..., 0], 0)
    for j in range(1, grid.dim):
        div_p = div_p + _diff(grid, p[..., j], j)
    hess = order_second_grad(nu).values
    out = np.einsum("...ai,...a->...i", gnu, div_p) + np.einsum("...aj,...aji->...i", p, hess)
    return VectorField(grid, out)


def curl_div_norms(te: TensorField) -> tuple[float, float]:
    """(L2, Linf) of curl(div T), the vorticity-alteration magnitude."""
    w = curl_vector(div_tensor(te))
    return l2_norm(w), linf_norm(w)


@dataclass(frozen=True)
class PotentialConditionReport:
    """Decision record for the gradient-potential condition on div T."""

    norms: tuple[tuple[float, float], ...]  # (h, linf of curl(div T)) per level
    observed_order: float | None
    verdict: str


def potential_condition_check(tensors: Sequence[TensorField]) -> PotentialConditionReport:
    """Classify a stress family as vorticity-conserving or altering.

    With three or more refinement levels the decision variable is the
    refinement order of ``||curl(div T)||_inf``: vanishing at discretization
    order (or exactly) means a scalar potential exists in the limit and the
    field is "conserving"; a norm bounded away from zero fits order ~0 and
    is "altering".  A single field can only be classified when its norm sits
    at the rounding floor.  The tensor-potential variant of the condition is
    equivalent in effect (both kill the alteration term), so only this norm
    is decision-bearing.
    """
    if len(tensors) == 0:
        raise TransportError("need at least one tensor field")
    levels = tuple((t.grid.spacing[0], curl_div_norms(t)[1]) for t in tensors)
    # curl(div .) amplifies rounding like eps/h^3; norms this small on O(1)
    # stress fields mean the alteration is exactly zero discretely.
    if max(e for _, e in levels) <= 1e-9:
        order = None if len(levels) < 3 else float("inf")
        return PotentialConditionReport(levels, order, "conserving")
    if len(tensors) < 3:
        return PotentialConditionReport(levels, None, "altering")
    report = refinement_study(dict(levels).__getitem__, [h for h, _ in levels])
    verdict = "conserving" if report.meets_order(1.5) else "altering"
    return PotentialConditionReport(levels, report.observed_order, verdict)


def cfl_number(state: TransportState, dt: float) -> float:
    v = state.velocity().values
    speed = float(np.max(np.sqrt(np.sum(v * v, axis=-1))))
    return speed * dt / min(state.grid.spacing)


def step(state: TransportState, config: TransportConfig) -> TransportState:
    """One explicit 4-stage Runge-Kutta step.

    Advances ``omega`` (and ``nu`` in advected mode) and re-solves the
    streamfunction from the updated vorticity.  With an identically-zero
    source the stage right sides reduce bit-for-bit to pure advection.
    """
    grid = state.grid
    cfl = cfl_number(state, config.dt)
    if cfl > config.cfl_limit:
        raise CFLError(f"CFL {cfl:.3f} exceeds limit {config.cfl_limit}")

    frozen = config.mode == FROZEN
    rhs_frozen: np.ndarray | None = None
    if frozen:
        rhs_frozen = transport_rhs(state, config.model).values

    def omega_rate(omega: np.ndarray, nu_values: np.ndarray, psi: np.ndarray) -> np.ndarray:
        adv = _arakawa(grid, psi, omega)  # J(psi, omega) = -(v.grad) omega
        if frozen:
            src = rhs_frozen
        else:
            nu_f = OrderField(grid, nu_values)
            te = substructural_stress(grid, nu_f, config.model)
            src = -curl_vector(div_tensor(te)).values
        if not np.any(src):
            return adv
        return adv + src

    def nu_rate(nu_values: np.ndarray, psi: np.ndarray) -> np.ndarray:
        out = np.empty_like(nu_values)
        for a in range(nu_values.shape[-1]):
            out[..., a] = _arakawa(grid, psi, nu_values[..., a])
        return out

    om0 = state.omega.values
    nu0 = state.nu.values
    psi0 = state.psi.values

    def stage(om: np.ndarray, nu: np.ndarray, psi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        dom = omega_rate(om, nu, psi)
        dnu = nu_rate(nu, psi) if not frozen else np.zeros_like(nu)
        return dom, dnu

    dt = config.dt
    k1o, k1n = stage(om0, nu0, psi0)
    psi1 = solve_streamfunction(grid, om0 + 0.5 * dt * k1o, config.poisson_tol)
    k2o, k2n = stage(om0 + 0.5 * dt * k1o, nu0 + 0.5 * dt * k1n, psi1)
    psi2 = solve_streamfunction(grid, om0 + 0.5 * dt * k2o, config.poisson_tol)
    k3o, k3n = stage(om0 + 0.5 * dt * k2o, nu0 + 0.5 * dt * k2n, psi2)
    psi3 = solve_streamfunction(grid, om0 + dt * k3o, config.poisson_tol)
    k4o, k4n = stage(om0 + dt * k3o, nu0 + dt * k3n, psi3)

    om1 = om0 + (dt / 6.0) * (k1o + 2.0 * k2o + 2.0 * k3o + k4o)
    nu1 = nu0 if frozen else nu0 + (dt / 6.0) * (k1n + 2.0 * k2n + 2.0 * k3n + k4n)
    psi_new = solve_streamfunction(grid, om1, config.poisson_tol)
    return TransportState(
        ScalarField(grid, om1),
        ScalarField(grid, psi_new),
        state.nu if frozen else OrderField(grid, nu1),
        state.t + dt,
    )


def enstrophy(state: TransportState) -> float:
    return 0.5 * float(np.sum(state.omega.values**2)) * state.grid.cell_volume


def te_work_rate(state: TransportState, model: ComplexFluidModel) -> float:
    """Rate of work done on the coarse flow by the substructural stress.

    ``integral of v . (-div T)``; a signed diagnostic of the energy transfer
    between the flow and the substructure (no closed budget is claimed in
    frozen mode).
    """
    te = substructural_stress(state.grid, state.nu, model)
    v = state.velocity().values
    force = -div_tensor(te).values
    return float(np.sum(v * force)) * state.grid.cell_volume


def omega_sign_changes(state: TransportState) -> int:
    """Count of sign changes of omega along grid lines (wrap included).

    A coarse proxy for vorticity-topology changes; reported as such, with no
    claim beyond counting zero crossings.
    """
    w = state.omega.values
    changes_x = np.signbit(w) ^ np.signbit(np.roll(w, -1, axis=0))
    changes_y = np.signbit(w) ^ np.signbit(np.roll(w, -1, axis=1))
    return int(np.sum(changes_x) + np.sum(changes_y))


@dataclass(frozen=True)
class RunSample:
    t: float
    l2_omega: float
    max_omega: float
    enstrophy: float
    rhs_norm: float
    te_work_rate: float


@dataclass
class RunResult:
    samples: list[RunSample] = dc_field(default_factory=list)
    final_state: TransportState | None = None
    sign_changes: list[tuple[float, int]] = dc_field(default_factory=list)

    @property
    def enstrophy_drift(self) -> float:
        z0 = self.samples[0].enstrophy
        return max(abs(s.enstrophy - z0) for s in self.samples) / abs(z0) if z0 else 0.0


def run(config: TransportConfig, initial: TransportState) -> RunResult:
    """Advance `steps` steps, sampling diagnostics every `report_every`."""
    result = RunResult()

    def sample(state: TransportState) -> None:
        rhs = transport_rhs(state, config.model)
        result.samples.append(
            RunSample(
                t=state.t,
                l2_omega=l2_norm(state.omega),
                max_omega=linf_norm(state.omega),
                enstrophy=enstrophy(state),
                rhs_norm=l2_norm(rhs),
                te_work_rate=te_work_rate(state, config.model),
            )
        )
        result.sign_changes.append((state.t, omega_sign_changes(state)))

    state = initial
    sample(state)
    for k in range(config.steps):
        state = step(state, config)
        if (k + 1) % config.report_every == 0 or k + 1 == config.steps:
            sample(state)
    result.final_state = state
    return result
