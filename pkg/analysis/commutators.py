"""Commutator fields and integrals behind the energy-conservation arguments.

Every derivative that would hit a rough field is moved onto the test
function or onto the analytically differentiated kernel, so the integrals
below are the integrated-by-parts forms::

    R1 = -<C1, d_t(phi u^e)>            C1 = rho^e u^e - (rho u)^e
    R2 = -<C2_ki, d_k(phi u^e_i)>       C2_ki = m^e_k u^e_i - (m_k u_i)^e
    R3 = -<Pi, div(phi u^e)>            Pi = p(rho^e) - p(rho)^e
    S  = -<C1, grad(P'(rho^e) phi)>

Divergences of tensors contract the first index, so the convective flux is
transported by the mollified momentum ``m^e``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from .besov import lp_norm
from .bumps import SupportsTestFunction, check_time_support
from .constants import TAYLOR_PAIR_MIN_SEPARATION, Axes, System
from .errors import LabError, RateFitError
from .grid import Field, Grid, align, restrict, shift_field
from .models import PressureLaw, pressure
from .mollify import (
    Kernel,
    apply_kernel,
    apply_kernel_gradient,
    build_kernel,
    mollify,
    mollify_gradient,
    one_sided_kernel,
    one_sided_time_average,
    time_difference_quotient,
)
from .rate_fit import (
    RateFit,
    extrapolate_limit,
    fit_power_law,
    richardson_extrapolate,
)

COMMUTATOR_TERMS: tuple[str, ...] = ("R1", "R2", "R3", "S_int")
ERROR_TERMS: tuple[str, ...] = ("E1", "E2", "E3", "E4", "E5")
ROUNDING_FACTOR: float = 64 * float(np.finfo(np.float64).eps)


def _integral(grid: Grid, values: np.ndarray) -> float:
    return float(np.sum(values) * grid.cell_volume * grid.dt)


def rectangle_floor(grid: Grid, integrand: np.ndarray) -> float:
    """Floor of the rectangle rule for ``integrand`` sampled on ``grid``.

    The gap between the full-grid rule and the rule on every other sample in
    each axis, plus a rounding term proportional to ``int |integrand|``.
    """
    weight = grid.cell_volume * grid.dt
    full = float(np.sum(integrand)) * weight
    coarse_slice = (slice(None, None, 2),) * integrand.ndim
    coarse = float(np.sum(integrand[coarse_slice])) * weight * 2**integrand.ndim
    rounding = ROUNDING_FACTOR * float(np.sum(np.abs(integrand))) * weight
    return abs(full - coarse) + rounding


def _check_system_inputs(
    system: System, rho: Field, u: Field, law_or_p: Field | PressureLaw | None
) -> None:
    if rho.components != 1:
        raise LabError(f"Density must be scalar, got {rho.components} components.")
    if u.components != rho.grid.d:
        raise LabError(f"Velocity must have {rho.grid.d} components, got {u.components}.")
    if system is System.COMPRESSIBLE and not isinstance(law_or_p, PressureLaw):
        raise LabError("The compressible system needs a PressureLaw.")
    if system is System.INHOMOGENEOUS_INCOMPRESSIBLE and not isinstance(law_or_p, Field):
        raise LabError("The incompressible system needs a sampled pressure field.")


def product_commutator(
    f: Field, g: Field, epsilon: float, axes: Axes | str = Axes.SPACE
) -> Field:
    """``f^eps g^eps - (f g)^eps`` on the valid window.

    ``f`` is scalar; ``g`` may be scalar or vector.
    """
    f, g = align(f, g)
    if f.components != 1:
        raise LabError("The first commutator factor must be scalar.")
    kernel = build_kernel(f.grid, epsilon, axes)
    product = f.with_values(f.values * g.values)
    smoothed_f = apply_kernel(f, kernel)
    smoothed_g = apply_kernel(g, kernel)
    return smoothed_f.with_values(
        smoothed_f.values * smoothed_g.values - apply_kernel(product, kernel).values
    )


def _kernel_entries(kernel: Kernel) -> list[tuple[int, tuple[int, ...], float]]:
    """``(time offset, spatial offset, weight)`` for every kernel entry."""
    if kernel.axes is Axes.SPACE:
        return [(0, offset, w) for offset, w in kernel.space]
    Jt = kernel.time_radius
    return [
        (a - Jt, offset, wt * ws)
        for a, wt in enumerate(kernel.time)
        if wt != 0.0
        for offset, ws in kernel.space
    ]


def decomposition_residual(
    f: Field, g: Field, epsilon: float, axes: Axes | str = Axes.SPACE
) -> float:
    """Max deviation from the pointwise commutator decomposition.

    Checks ``f^e g^e - (fg)^e = (f^e - f)(g^e - g) - int eta^e(y) (f(.-y) - f)(g(.-y) - g) dy``
    with the last integral evaluated by direct quadrature over the kernel
    stencil.
    """
    f, g = align(f, g)
    kernel = build_kernel(f.grid, epsilon, axes)
    lhs = product_commutator(f, g, epsilon, axes)
    smoothed_f = apply_kernel(f, kernel)
    smoothed_g = apply_kernel(g, kernel)
    start, stop = lhs.window
    base_f = restrict(f, start, stop).values
    base_g = restrict(g, start, stop).values
    spatial_axes = tuple(range(1, 1 + f.grid.d))

    increment = np.zeros_like(lhs.values)
    for a, offset, weight in _kernel_entries(kernel):
        if a == 0 and not any(offset):
            continue
        lo, hi = start - a - f.t_start, stop - a - f.t_start
        shifted_f = np.roll(f.values[lo:hi], offset, axis=spatial_axes)
        shifted_g = np.roll(g.values[lo:hi], offset, axis=spatial_axes)
        increment += weight * (shifted_f - base_f) * (shifted_g - base_g)
    rhs = (smoothed_f.values - base_f) * (smoothed_g.values - base_g) - increment
    return float(np.max(np.abs(lhs.values - rhs))) if rhs.size else 0.0


@dataclass(frozen=True)
class MollifiedState:
    """Space-time mollified quantities shared by commutator and identity checks.

    Arrays cover the rows ``[t_start, t_stop)``. ``grad_u[..., i, k]`` is
    ``d_k u^e_i``; ``momentum_flux[..., k, i]`` is ``(m_k u_i)^e``.
    """

    system: System
    grid: Grid
    epsilon: float
    t_start: int
    t_stop: int
    rho: np.ndarray
    u: np.ndarray
    m: np.ndarray
    du_dt: np.ndarray
    grad_u: np.ndarray
    grad_rho: np.ndarray
    momentum_flux: np.ndarray
    pressure: np.ndarray
    pressure_mollified: np.ndarray | None
    law: PressureLaw | None

    @property
    def mass_commutator(self) -> np.ndarray:
        return self.rho[..., np.newaxis] * self.u - self.m

    @property
    def convective_commutator(self) -> np.ndarray:
        return self.m[..., :, np.newaxis] * self.u[..., np.newaxis, :] - self.momentum_flux

    @property
    def pressure_commutator(self) -> np.ndarray | None:
        if self.pressure_mollified is None:
            return None
        return self.pressure - self.pressure_mollified

    @property
    def divergence(self) -> np.ndarray:
        return np.trace(self.grad_u, axis1=-2, axis2=-1)


def mollified_state(
    system: System | str,
    rho: Field,
    u: Field,
    law_or_p: Field | PressureLaw,
    epsilon: float,
) -> MollifiedState:
    """Mollify ``rho``, ``u``, ``rho u``, ``rho u (x) u`` and the pressure in space-time."""
    system = System(system)
    _check_system_inputs(system, rho, u, law_or_p)
    if isinstance(law_or_p, Field):
        rho, u, p_field = align(rho, u, law_or_p)
    else:
        rho, u = align(rho, u)
        p_field = None
    grid = rho.grid
    d = grid.d
    kernel = build_kernel(grid, epsilon, Axes.SPACETIME)

    momentum = u.with_values(rho.values * u.values)
    flux = (momentum.values[..., :, np.newaxis] * u.values[..., np.newaxis, :]).reshape(
        *u.values.shape[:-1], d * d
    )
    rho_e = apply_kernel(rho, kernel)
    u_e = apply_kernel(u, kernel)
    m_e = apply_kernel(momentum, kernel)
    flux_e = apply_kernel(u.with_values(flux), kernel)
    velocity_grads = [apply_kernel_gradient(u.component(i), kernel).values for i in range(d)]
    rho_grad = apply_kernel_gradient(rho, kernel).values

    r = rho_e.values[..., 0]
    if system is System.COMPRESSIBLE:
        law = law_or_p
        p_values = law.p(r)
        p_moll = apply_kernel(pressure(law, rho), kernel).values[..., 0]
    else:
        law = None
        p_values = apply_kernel(p_field, kernel).values[..., 0]
        p_moll = None

    logger.debug(f"Mollified state eps={epsilon:.5g} on window {rho_e.window}")
    return MollifiedState(
        system=system,
        grid=grid,
        epsilon=float(epsilon),
        t_start=rho_e.t_start,
        t_stop=rho_e.t_stop,
        rho=r,
        u=u_e.values,
        m=m_e.values,
        du_dt=np.stack([g[..., 0] for g in velocity_grads], axis=-1),
        grad_u=np.stack([g[..., 1:] for g in velocity_grads], axis=-2),
        grad_rho=rho_grad[..., 1:],
        momentum_flux=flux_e.values.reshape(*u_e.values.shape[:-1], d, d),
        pressure=p_values,
        pressure_mollified=p_moll,
        law=law,
    )


@dataclass(frozen=True)
class CommutatorReport:
    """Commutator integrals at one ``epsilon``.

    ``R3`` and ``S_int`` are ``None`` for the incompressible system.
    ``pointwise_sup`` is the max magnitude of ``rho^e u^e - (rho u)^e``.
    """

    epsilon: float
    R1: float
    R2: float
    R3: float | None
    S_int: float | None
    pointwise_sup: float

    def term(self, name: str) -> float | None:
        return getattr(self, name)

    @property
    def total(self) -> float:
        return self.R1 + self.R2 + (self.R3 or 0.0) + (self.S_int or 0.0)


def commutator_terms(state: MollifiedState, phi: SupportsTestFunction) -> CommutatorReport:
    """Evaluate ``R1``, ``R2``, ``R3`` and ``S_int`` on a prebuilt state."""
    grid = state.grid
    samples = phi.evaluate(grid, state.t_start, state.t_stop)
    phi_v = samples.phi
    dphi_dt = samples.dphi_dt
    grad_phi = samples.grad_phi
    u = state.u
    c1 = state.mass_commutator
    c2 = state.convective_commutator

    r1 = -_integral(
        grid, np.sum(c1 * (dphi_dt[..., np.newaxis] * u + phi_v[..., np.newaxis] * state.du_dt), axis=-1)
    )
    # d_k(phi u_i) indexed [..., k, i]
    d_phi_u = grad_phi[..., :, np.newaxis] * u[..., np.newaxis, :] + phi_v[
        ..., np.newaxis, np.newaxis
    ] * np.swapaxes(state.grad_u, -1, -2)
    r2 = -_integral(grid, np.sum(c2 * d_phi_u, axis=(-2, -1)))

    r3 = s_int = None
    pi = state.pressure_commutator
    if pi is not None and state.law is not None:
        div_phi_u = np.sum(grad_phi * u, axis=-1) + phi_v * state.divergence
        r3 = -_integral(grid, pi * div_phi_u)
        weight = (
            state.law.dpotential(state.rho)[..., np.newaxis] * grad_phi
            + (phi_v * state.law.d2potential(state.rho))[..., np.newaxis] * state.grad_rho
        )
        s_int = -_integral(grid, np.sum(c1 * weight, axis=-1))

    sup = float(np.max(np.linalg.norm(c1, axis=-1))) if c1.size else 0.0
    return CommutatorReport(
        epsilon=state.epsilon, R1=r1, R2=r2, R3=r3, S_int=s_int, pointwise_sup=sup
    )


def commutator_integrals(
    system: System | str,
    rho: Field,
    u: Field,
    law_or_p: Field | PressureLaw,
    phi: SupportsTestFunction,
    epsilon: float,
) -> CommutatorReport:
    """Commutator integrals at one ``epsilon``.

    Raises:
        SupportError: If the time support of ``phi`` leaves ``(eps, T - eps)``.
    """
    check_time_support(phi, rho.grid, epsilon, epsilon)
    state = mollified_state(system, rho, u, law_or_p, epsilon)
    report = commutator_terms(state, phi)
    logger.debug(
        f"eps={epsilon:.5g}: R1={report.R1:.4e}, R2={report.R2:.4e}, "
        f"R3={report.R3}, S={report.S_int}"
    )
    return report


@dataclass(frozen=True)
class CommutatorSweep:
    """Reports per ``epsilon`` (ascending) plus a rate fit per term."""

    reports: tuple[CommutatorReport, ...]
    fits: dict[str, RateFit | None] = field(default_factory=dict)


def fit_term(scales: Sequence[float], values: Sequence[float], label: str) -> RateFit | None:
    """Power-law fit of ``|values|`` on the four finest scales, or ``None``."""
    order = np.argsort(scales)[:4]
    try:
        return fit_power_law(
            [scales[i] for i in order], [abs(values[i]) for i in order]
        )
    except RateFitError as exc:
        logger.warning(f"No rate fit for {label}: {exc}")
        return None


def commutator_sweep(
    system: System | str,
    rho: Field,
    u: Field,
    law_or_p: Field | PressureLaw,
    phi: SupportsTestFunction,
    eps_list: Sequence[float],
) -> CommutatorSweep:
    """Commutator integrals over an ``epsilon`` sweep with per-term rate fits.

    Slopes are fitted on the four finest radii.
    """
    eps_sorted = sorted(float(e) for e in eps_list)
    reports = tuple(
        commutator_integrals(system, rho, u, law_or_p, phi, eps) for eps in eps_sorted
    )
    fits: dict[str, RateFit | None] = {}
    for name in COMMUTATOR_TERMS:
        values = [r.term(name) for r in reports]
        if any(v is None for v in values):
            continue
        fits[name] = fit_term(eps_sorted, values, name)  # type: ignore[arg-type]
    return CommutatorSweep(reports, fits)


def taylor_pressure_bound_check(law: PressureLaw, rho: Field, epsilon: float) -> float:
    """Empirical Taylor constant ``C`` for ``p`` on the attained densities.

    Pairs ``(s0, s)`` are ``(rho(x), rho(x - y))`` for every spatial kernel
    offset ``y`` and ``(rho(x), rho^eps(x))``. Pairs closer than
    ``1e-4 * max(1, |s0|)`` are skipped.

    Returns:
        ``max |p(s) - p(s0) - p'(s0)(s - s0)| / (s - s0)^2``, or 0 when no
        pair qualifies.
    """
    kernel = build_kernel(rho.grid, epsilon, Axes.SPACE)
    base = law.admissible(rho.scalar)
    spatial_axes = tuple(range(1, 1 + rho.grid.d))
    partners = [np.roll(base, offset, axis=spatial_axes) for offset, _ in kernel.space if any(offset)]
    partners.append(law.admissible(apply_kernel(rho, kernel).scalar))
    p0, dp0 = law.p(base), law.dp(base)
    threshold = TAYLOR_PAIR_MIN_SEPARATION * np.maximum(1.0, np.abs(base))
    worst = 0.0
    for s in partners:
        gap = s - base
        usable = np.abs(gap) >= threshold
        if not np.any(usable):
            continue
        g = gap[usable]
        remainder = np.abs(law.p(s[usable]) - p0[usable] - dp0[usable] * g)
        worst = max(worst, float(np.max(remainder / g**2)))
    return worst


@dataclass(frozen=True)
class ErrorTerms:
    """The five error integrals of the time-averaged energy balance.

    ``quadrature_floor`` is the largest rectangle-rule floor of the five
    integrands; values below a small multiple of it carry no signal.
    """

    epsilon: float
    h: float
    E1: float
    E2: float
    E3: float
    E4: float
    E5: float
    quadrature_floor: float = 0.0

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.E1, self.E2, self.E3, self.E4, self.E5)


def _space_gradient(field_: Field, epsilon: float) -> Field:
    """Spatial gradient of ``field^eps`` for each component, ``[..., i, k]``."""
    grads = [mollify_gradient(field_.component(i), epsilon).values for i in range(field_.components)]
    return field_.with_values(np.stack(grads, axis=-2).reshape(*field_.values.shape[:-1], -1))


def bv_error_terms(
    rho: Field,
    u: Field,
    law: PressureLaw,
    phi: SupportsTestFunction,
    epsilon: float,
    h: float,
) -> ErrorTerms:
    """Error integrals ``E1..E5`` for the space-mollified, time-averaged balance.

    ``v^{e,h}`` is the one-sided time average of the spatial mollification
    ``v^e``. Time derivatives of ``v^{e,h}`` are the exact difference
    quotients ``(v^e(t + h) - v^e(t)) / h``.

    Raises:
        SupportError: If ``phi`` is not supported in ``(h + eps, T - h - eps)``.
    """
    rho, u = align(rho, u)
    grid = rho.grid
    d = grid.d
    H = one_sided_kernel(grid, h).cells
    check_time_support(phi, grid, h + epsilon, h + epsilon)

    momentum = u.with_values(rho.values * u.values)
    flux = u.with_values(
        (momentum.values[..., :, np.newaxis] * u.values[..., np.newaxis, :]).reshape(
            *u.values.shape[:-1], d * d
        )
    )
    rho_e = mollify(rho, epsilon)
    u_e = mollify(u, epsilon)
    m_e = mollify(momentum, epsilon)
    flux_e = mollify(flux, epsilon)
    p_e = mollify(pressure(law, rho), epsilon)
    grad_u_e = _space_gradient(u, epsilon)
    grad_rho_e = mollify_gradient(rho, epsilon)

    # time-averaged quantities live on rows [t_start, t_stop - H)
    rho_eh = one_sided_time_average(rho_e, h)
    u_eh = one_sided_time_average(u_e, h)
    m_eh = one_sided_time_average(m_e, h)
    p_eh = one_sided_time_average(p_e, h)
    grad_u_eh = one_sided_time_average(grad_u_e, h)
    grad_rho_eh = one_sided_time_average(grad_rho_e, h)
    transported = (m_e.values[..., :, np.newaxis] * u_e.values[..., np.newaxis, :]).reshape(
        *u_e.values.shape[:-1], d * d
    )
    model_flux_h = one_sided_time_average(flux_e.with_values(transported), h)
    y_h = one_sided_time_average(flux_e.with_values(transported - flux_e.values), h)
    c_h = one_sided_time_average(
        u_e.with_values(rho_e.values * u_e.values - m_e.values), h
    )
    u_e_next = shift_field(u_e, (H,) + (0,) * d)
    grad_u_e_next = shift_field(grad_u_e, (H,) + (0,) * d)
    du_eh_dt = time_difference_quotient(u_e, h)

    start, stop = u_eh.window

    def window(f: Field) -> np.ndarray:
        return restrict(f, start, stop).values

    samples = phi.evaluate(grid, start, stop)
    phi_v, dphi_dt, grad_phi = samples.phi, samples.dphi_dt, samples.grad_phi
    phi_c = phi_v[..., np.newaxis]

    shape_t = (*u_eh.values.shape[:-1], d, d)
    r_eh = window(rho_eh)[..., 0]
    v_eh = window(u_eh)
    mom_eh = window(m_eh)
    mom_e = window(m_e)
    g_eh = window(grad_u_eh).reshape(shape_t)  # [..., i, k] = d_k u^{e,h}_i
    v_next = window(u_e_next)
    g_next = window(grad_u_e_next).reshape(shape_t)
    flux_h = window(model_flux_h).reshape(shape_t)  # [..., k, i]
    y = window(y_h).reshape(shape_t)
    c = window(c_h)
    dv_dt = window(du_eh_dt)

    # d_k (u^e(t+h) . u^{e,h})
    grad_dot = np.einsum("...ik,...i->...k", g_next, v_eh) + np.einsum(
        "...ik,...i->...k", g_eh, v_next
    )
    grad_sq = 2 * np.einsum("...ik,...i->...k", g_eh, v_eh)
    integrands = [
        phi_v
        * (
            np.sum(mom_eh * grad_dot, axis=-1)
            - 0.5 * np.sum(mom_e * grad_sq, axis=-1)
            - np.einsum("...ki,...ik->...", flux_h, g_eh)
        )
    ]

    divergence = np.trace(g_eh, axis1=-2, axis2=-1)
    integrands.append((law.p(r_eh) - window(p_eh)[..., 0]) * divergence * phi_v)

    grad_weight = (
        (law.d2potential(r_eh) * phi_v)[..., np.newaxis] * window(grad_rho_eh)
        + law.dpotential(r_eh)[..., np.newaxis] * grad_phi
    )
    integrands.append(-np.sum(grad_weight * (mom_eh - r_eh[..., np.newaxis] * v_eh), axis=-1))

    # d_k(u^{e,h}_i phi) indexed [..., k, i]
    d_v_phi = grad_phi[..., :, np.newaxis] * v_eh[..., np.newaxis, :] + phi_v[
        ..., np.newaxis, np.newaxis
    ] * np.swapaxes(g_eh, -1, -2)
    integrands.append(np.sum(y * d_v_phi, axis=(-2, -1)))

    dt_v_phi = dv_dt * phi_c + v_eh * dphi_dt[..., np.newaxis]
    integrands.append(np.sum(c * dt_v_phi, axis=-1))

    e1, e2, e3, e4, e5 = (_integral(grid, values) for values in integrands)
    floor = max(rectangle_floor(grid, values) for values in integrands)

    logger.debug(
        f"eps={epsilon:.5g}, h={h:.5g}: E=({e1:.3e}, {e2:.3e}, {e3:.3e}, {e4:.3e}, {e5:.3e})"
    )
    return ErrorTerms(float(epsilon), float(h), e1, e2, e3, e4, e5, floor)


@dataclass(frozen=True)
class IteratedLimit:
    """``E1..E5`` over an ``(h, eps)`` grid and their ``eps -> 0`` extrapolation.

    Attributes:
        terms: Every evaluated cell, ordered by ``h`` then ``eps``.
        extrapolated: Per ``h`` (ascending), the five extrapolated values.
    """

    terms: tuple[ErrorTerms, ...]
    extrapolated: dict[float, tuple[float, ...]]

    @property
    def h_values(self) -> tuple[float, ...]:
        return tuple(sorted(self.extrapolated))

    @property
    def quadrature_floor(self) -> float:
        return max((cell.quadrature_floor for cell in self.terms), default=0.0)

    def floor_at(self, h: float) -> float:
        """Largest cell floor among the radii swept at ``h``."""
        return max((cell.quadrature_floor for cell in self.terms if cell.h == h), default=0.0)

    @property
    def double_limit(self) -> tuple[float, ...]:
        """``h -> 0`` extrapolation of the ``eps -> 0`` values, per term."""
        hs = list(self.h_values)
        return tuple(
            extrapolate_limit(hs, [self.extrapolated[h][i] for h in hs])
            for i in range(len(ERROR_TERMS))
        )


def extrapolate_to_zero(scales: Sequence[float], values: Sequence[float]) -> float:
    """Richardson-extrapolate a signed series to zero scale.

    Uses the slope fitted to ``|values|``; falls back to the finest value when
    no positive slope is available.
    """
    order = np.argsort(scales)
    finest = float(values[order[0]])
    if len(scales) < 2 or all(v == 0 for v in values):
        return finest
    fit = fit_term(scales, values, "extrapolation") if len(scales) >= 4 else None
    if fit is None or fit.exact or not math.isfinite(fit.slope) or fit.slope <= 0:
        return finest
    return richardson_extrapolate(
        (scales[order[0]], scales[order[1]]), (values[order[0]], values[order[1]]), fit.slope
    )


def iterated_limit_sweep(
    rho: Field,
    u: Field,
    law: PressureLaw,
    phi: SupportsTestFunction,
    eps_list: Sequence[float],
    h_list: Sequence[float],
) -> IteratedLimit:
    """Evaluate ``E1..E5`` for every ``(h, eps)`` and take ``eps -> 0`` first.

    The ``eps -> 0`` value at each ``h`` comes from ``extrapolate_limit``:
    only ``E5`` vanishes there, the other terms vanish once ``h -> 0``.
    """
    eps_sorted = sorted(float(e) for e in eps_list)
    cells: list[ErrorTerms] = []
    extrapolated: dict[float, tuple[float, ...]] = {}
    for h in sorted(float(x) for x in h_list):
        row = [bv_error_terms(rho, u, law, phi, eps, h) for eps in eps_sorted]
        cells.extend(row)
        extrapolated[h] = tuple(
            extrapolate_limit(eps_sorted, [cell.as_tuple()[i] for cell in row])
            for i in range(len(ERROR_TERMS))
        )
        logger.info(f"h={h:.5g}: extrapolated E = {extrapolated[h]}")
    return IteratedLimit(tuple(cells), extrapolated)


def commutator_norm(f: Field, g: Field, epsilon: float, p: float = 1.0) -> float:
    """``||f^e g^e - (fg)^e||_p`` for spatial mollification."""
    return lp_norm(product_commutator(f, g, epsilon), p)
