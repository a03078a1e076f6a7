"""Energy, descent gradient, and guarded adaptive integration.

The heights follow the steepest-descent flow of the energy: a quadratic
stretching term along edges (per thread family for weaves) plus a 1/|gap|
repulsion between the two copies at every vertex.  The integrator performs
classical fourth-order Runge-Kutta steps, rejects any step that breaks a
structural guard (finiteness, crossing signs, gap floor, energy descent),
and adapts the step size between the configured bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    GapGuardTripped,
    InvalidInitial,
    StepUnderflow,
    ZeroGap,
)
from .model import Configuration
from .topology import tangle_decomposition

__all__ = [
    "FlowParams",
    "Sample",
    "Trajectory",
    "energy_entangled",
    "energy_weave",
    "gradient",
    "stationarity_residual",
    "step",
    "integrate",
]

# fraction of the initial inverse energy used as the minimum-gap floor
_DEFAULT_GAP_SAFETY = 0.5

# accepted steps may raise the energy by at most this fraction of the
# initial energy (absorbs rounding noise near stationarity)
_ENERGY_CUSHION = 1e-13

# the classical RK4 stability interval on the negative real axis ends near
# 2.785; keep lambda*dt under this margin so stiff gap modes stay damped
# instead of cycling between growth and energy-guard rejection
_STABILITY_MARGIN = 2.5


@dataclass(frozen=True)
class FlowParams:
    """Integrator controls.  Steps start at dt_init, halve on rejection down
    to dt_min, and grow by 25% per accepted step up to dt_max (never beyond
    the stability estimate for the current minimum gap)."""

    dt_init: float = 1e-3
    dt_min: float = 1e-9
    dt_max: float = 0.1
    t_max: float = 1e4
    grad_tol: float = 1e-10
    gap_safety: float = 0.5
    record_stride: int = 100

    def __post_init__(self):
        if not self.dt_min > 0:
            raise ValueError(f"dt_min must be positive, got {self.dt_min!r}")
        if self.dt_init < self.dt_min:
            raise ValueError(
                f"dt_init ({self.dt_init!r}) must be at least dt_min ({self.dt_min!r})"
            )
        if self.dt_max < self.dt_init:
            raise ValueError(
                f"dt_max ({self.dt_max!r}) must be at least dt_init ({self.dt_init!r})"
            )
        if not self.t_max > 0:
            raise ValueError(f"t_max must be positive, got {self.t_max!r}")
        if not self.grad_tol > 0:
            raise ValueError(f"grad_tol must be positive, got {self.grad_tol!r}")
        if not 0.0 < self.gap_safety < 1.0:
            raise ValueError(
                f"gap_safety must lie strictly between 0 and 1, got {self.gap_safety!r}"
            )
        if not (isinstance(self.record_stride, int) and self.record_stride >= 1):
            raise ValueError(
                f"record_stride must be a positive integer, got {self.record_stride!r}"
            )


@dataclass(frozen=True)
class Sample:
    """One recorded trajectory point with its diagnostics."""

    t: float
    config: Configuration
    energy: float
    grad_norm: float
    min_gap: float
    m_blue: float
    m_red: float
    m_components: tuple = ()


@dataclass(frozen=True)
class Trajectory:
    """Recorded samples of one integration run."""

    system: object
    samples: tuple
    status: str  # "converged" or "truncated"


def _checked_gaps(config) -> np.ndarray:
    d = config.z_blue - config.z_red
    zero = np.nonzero(d == 0.0)[0]
    if zero.size:
        raise ZeroGap(int(zero[0]))
    return d


def _quadratic_term(system, z_blue, z_red) -> float:
    if system.kind == "weave":
        return float(
            -(z_blue @ system.blue_laplacian @ z_blue)
            - (z_red @ system.red_laplacian @ z_red)
        )
    return float(
        -(z_blue @ system.laplacian @ z_blue) - (z_red @ system.laplacian @ z_red)
    )


def _total_energy(system, config) -> float:
    d = _checked_gaps(config)
    return (
        system.planar_term(config.x)
        + _quadratic_term(system, config.z_blue, config.z_red)
        + float(np.sum(1.0 / np.abs(d)))
    )


def energy_entangled(system, config) -> float:
    """Energy of a quotient-graph realization."""
    if system.kind != "entangled-graph":
        raise TypeError(f"expected an entangled-graph system, got kind={system.kind!r}")
    return _total_energy(system, config)


def energy_weave(system, config) -> float:
    """Energy of a weave realization."""
    if system.kind != "weave":
        raise TypeError(f"expected a weave system, got kind={system.kind!r}")
    return _total_energy(system, config)


def _velocity(system, z_blue, z_red):
    """Descent velocity of the heights (negative energy gradient)."""
    d = z_blue - z_red
    with np.errstate(divide="ignore", invalid="ignore"):
        repulsion = system.sign / (d * d)
    if system.kind == "weave":
        v_blue = 2.0 * (system.blue_laplacian @ z_blue) + repulsion
        v_red = 2.0 * (system.red_laplacian @ z_red) - repulsion
    else:
        v_blue = 2.0 * (system.laplacian @ z_blue) + repulsion
        v_red = 2.0 * (system.laplacian @ z_red) - repulsion
    return v_blue, v_red


def _planar_velocity(system, x):
    tension = x[system._edge_v] + system._edge_shift - x[system._edge_u]
    out = np.zeros_like(x)
    np.add.at(out, system._edge_u, tension)
    np.add.at(out, system._edge_v, -tension)
    return 2.0 * out


def gradient(system, config):
    """Descent direction (v_blue, v_red) of the height flow at config."""
    _checked_gaps(config)
    return _velocity(system, config.z_blue, config.z_red)


def stationarity_residual(system, config) -> float:
    """Sup norm of the descent velocity; zero exactly at stationary points."""
    v_blue, v_red = gradient(system, config)
    return max(float(np.max(np.abs(v_blue))), float(np.max(np.abs(v_red))))


def _rk4(system, z_blue, z_red, x, dt, flow_planar, k1=None):
    """One Runge-Kutta step of the joint height (and optionally planar) flow.
    Returns the new (z_blue, z_red, x)."""

    def vel(zb, zr, xx):
        vb, vr = _velocity(system, zb, zr)
        vx = _planar_velocity(system, xx) if flow_planar else None
        return vb, vr, vx

    if k1 is None:
        k1 = vel(z_blue, z_red, x)

    def advance(c, k):
        zb = z_blue + c * dt * k[0]
        zr = z_red + c * dt * k[1]
        xx = x + c * dt * k[2] if flow_planar else x
        return zb, zr, xx

    k2 = vel(*advance(0.5, k1))
    k3 = vel(*advance(0.5, k2))
    k4 = vel(*advance(1.0, k3))
    sixth = dt / 6.0
    new_blue = z_blue + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    new_red = z_red + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    if flow_planar:
        new_x = x + sixth * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    else:
        new_x = x
    return new_blue, new_red, new_x


def _guard_reason(system, z_blue, z_red, x, gap_floor):
    """Why the end state is structurally unacceptable, or None."""
    if not (np.all(np.isfinite(z_blue)) and np.all(np.isfinite(z_red)) and np.all(np.isfinite(x))):
        return "non-finite heights"
    d = z_blue - z_red
    if np.any(d == 0.0) or np.any(np.sign(d) != system.sign):
        return "crossing sign flipped"
    if float(np.min(np.abs(d))) < gap_floor:
        return f"minimum gap fell below the floor {gap_floor:.3e}"
    return None


def step(system, config, dt) -> Configuration:
    """One guarded Runge-Kutta step of size dt.

    The guard checks the end state: heights must stay finite, every crossing
    must keep its sign, and no gap may fall below gap_safety divided by the
    energy at the input configuration.
    """
    energy = _total_energy(system, config)
    gap_floor = _DEFAULT_GAP_SAFETY / energy
    z_blue, z_red, x = _rk4(
        system, config.z_blue, config.z_red, config.x, dt, flow_planar=False
    )
    reason = _guard_reason(system, z_blue, z_red, x, gap_floor)
    if reason is not None:
        raise GapGuardTripped(f"step of size {dt!r} rejected: {reason}")
    return Configuration(x=config.x, z_blue=z_blue, z_red=z_red)


def _component_vertex_indices(system):
    """Per tangle component (top to bottom): the vertex index arrays whose
    blue / red heights the component barycenter sums."""
    decomposition = tangle_decomposition(system)
    members = []
    for comp in decomposition.components:
        blue = np.array(
            [v for i in comp.blue for v in system.blue_threads[i - 1]], dtype=int
        )
        red = np.array(
            [v for j in comp.red for v in system.red_threads[j - 1]], dtype=int
        )
        members.append((blue, red))
    return members


def integrate(system, config0, params: FlowParams = FlowParams(), flow_planar: bool = False) -> Trajectory:
    """Run the guarded descent flow from config0.

    Stops with status "converged" when the sup-norm velocity drops below
    grad_tol, or "truncated" at t_max.  Samples are recorded at t = 0, after
    every record_stride-th accepted step, and at the final state.  A step is
    rejected (and dt halved) when it trips a structural guard or raises the
    energy; rejection at dt_min raises StepUnderflow.
    """
    d0 = config0.z_blue - config0.z_red
    if config0.z_blue.shape != (system.n_vertices,) or config0.z_red.shape != (
        system.n_vertices,
    ):
        raise InvalidInitial(
            f"initial heights must have shape ({system.n_vertices},)"
        )
    if np.any(d0 == 0.0) or np.any(np.sign(d0) != system.sign):
        bad = int(
            np.nonzero((d0 == 0.0) | (np.sign(d0) != system.sign))[0][0]
        )
        raise InvalidInitial(
            f"initial heights violate the crossing sign at vertex {bad}"
        )

    e0 = _total_energy(system, config0)
    gap_floor = params.gap_safety / e0
    members = _component_vertex_indices(system) if system.kind == "weave" else None
    x_term = system.planar_term(config0.x)
    # Gershgorin bound on the stretching part of the flow Jacobian; the gap
    # repulsion adds at most 4/min_gap^3 on top of it
    if system.kind == "weave":
        quad_rate = 2.0 * max(
            float(np.max(np.sum(np.abs(system.blue_laplacian), axis=1))),
            float(np.max(np.sum(np.abs(system.red_laplacian), axis=1))),
        )
    else:
        quad_rate = 2.0 * float(np.max(np.sum(np.abs(system.laplacian), axis=1)))

    def make_sample(t, config, energy, grad_norm):
        d = config.z_blue - config.z_red
        if members is None:
            m_components = ()
        else:
            m_components = tuple(
                float(np.sum(config.z_blue[blue])) + float(np.sum(config.z_red[red]))
                for blue, red in members
            )
        return Sample(
            t=t,
            config=config,
            energy=energy,
            grad_norm=grad_norm,
            min_gap=float(np.min(np.abs(d))),
            m_blue=float(np.mean(config.z_blue)),
            m_red=float(np.mean(config.z_red)),
            m_components=m_components,
        )

    t = 0.0
    dt = params.dt_init
    config = config0
    energy = e0
    v_blue, v_red = _velocity(system, config.z_blue, config.z_red)
    v_x = _planar_velocity(system, config.x) if flow_planar else None

    def sup_velocity():
        g = max(float(np.max(np.abs(v_blue))), float(np.max(np.abs(v_red))))
        if flow_planar:
            g = max(g, float(np.max(np.abs(v_x))))
        return g

    grad_norm = sup_velocity()
    samples = [make_sample(t, config, energy, grad_norm)]
    accepted = 0
    cushion = _ENERGY_CUSHION * abs(e0)

    while True:
        if grad_norm < params.grad_tol:
            status = "converged"
            break
        if t >= params.t_max:
            status = "truncated"
            break
        dt_eff = min(dt, params.t_max - t)
        k1 = (v_blue, v_red, v_x)
        new_blue, new_red, new_x = _rk4(
            system, config.z_blue, config.z_red, config.x, dt_eff, flow_planar, k1=k1
        )
        reason = _guard_reason(system, new_blue, new_red, new_x, gap_floor)
        if reason is None:
            if flow_planar:
                x_term = system.planar_term(new_x)
            gaps = np.abs(new_blue - new_red)
            new_energy = (
                x_term
                + _quadratic_term(system, new_blue, new_red)
                + float(np.sum(1.0 / gaps))
            )
            if new_energy > energy + cushion:
                reason = "energy increased"
        if reason is not None:
            if dt_eff <= params.dt_min:
                raise StepUnderflow(t, dt_eff)
            dt = max(dt_eff / 2.0, params.dt_min)
            continue
        t += dt_eff
        config = Configuration(x=new_x, z_blue=new_blue, z_red=new_red)
        energy = new_energy
        accepted += 1
        stable_dt = _STABILITY_MARGIN / (quad_rate + 4.0 / float(np.min(gaps)) ** 3)
        dt = max(params.dt_min, min(dt * 1.25, params.dt_max, stable_dt))
        v_blue, v_red = _velocity(system, config.z_blue, config.z_red)
        if flow_planar:
            v_x = _planar_velocity(system, config.x)
        grad_norm = sup_velocity()
        if accepted % params.record_stride == 0:
            samples.append(make_sample(t, config, energy, grad_norm))

    if samples[-1].t < t:
        samples.append(make_sample(t, config, energy, grad_norm))
    return Trajectory(system=system, samples=tuple(samples), status=status)
