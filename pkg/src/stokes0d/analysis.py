"""Discrete energy bookkeeping, periodicity detection and error norms.

The energy functionals mirror the balance law of the coupled problem:
kinetic energy of the flow regions, stored circuit energy (1/2)||U^{1/2}y||^2,
viscous dissipation, the resistive interface dissipation sum of R Q^2, the
circuit dissipation y^T B y and the two forcing terms.  The stage-1 audit
recomputes both sides of the discrete balance identity that the splitting
scheme satisfies step by step; its residual should sit at solver precision.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .circuits import eval_B
from .fem import interpolate_pressure, interpolate_velocity


@dataclass(frozen=True)
class EnergyReport:
    e_omega: float     # kinetic energy of the flow regions
    e_ups: float       # stored circuit energy
    d_omega: float     # viscous dissipation rate
    d_rc: float        # resistive interface dissipation rate
    u_ups: float       # circuit element dissipation rate y^T B y
    f_omega: float     # body-force / external-pressure power input
    f_ups: float       # generator power input

    @property
    def total(self) -> float:
        return self.e_omega + self.e_ups


def energy_report(system, state, dt_fd: float | None = None) -> EnergyReport:
    e_om = d_om = f_om = 0.0
    for dom, v in zip(system.domains, state.velocities):
        mv = dom.ops.M @ v
        e_om += 0.5 * dom.rho * float(v @ mv)
        d_om += dom.mu * float(v @ (dom.ops.K @ v))
        if dom.body_load is not None:
            f_om += float(dom.body_load(state.t) @ v)
        if dom.pbar is not None:
            f_om -= float(dom.pbar(state.t)) * float(dom.ops.sigma @ v)
    e_up = u_up = f_up = 0.0
    for spec, y in zip(system.circuits, state.ys):
        U = spec.U(y, state.t)
        e_up += 0.5 * float(y @ (U * y))
        u_up += float(y @ (eval_B(spec, y, state.t, dt_fd) @ y))
        f_up += float(spec.s(y, state.t) @ (U * y))
    d_rc = sum(b.connection.resistance * state.interfaces[b.interface_id].Q ** 2
               for b in system.bindings)
    return EnergyReport(e_om, e_up, d_om, d_rc, u_up, f_om, f_up)


def step1_energy_residual(system, previous, intermediate, dt: float):
    """Both sides of the stage-1 discrete energy identity and their gap.

    With v* and y* the intermediate solution, the scheme satisfies exactly

      (1/dt)(rho ||v*||^2 + ||U^{1/2} y*||^2) + mu ||grad v*||^2 + sum R Q*^2
        = (1/dt)(rho (v^n, v*) + (y^n)^T U y* ) + forcing power,

    the unhalved-norm form that the stability proof chains through Young's
    inequality.  Returns (lhs, rhs, relative residual).
    """
    t_new = previous.t + dt
    lhs = rhs = 0.0
    for dom, vn, vs in zip(system.domains, previous.velocities,
                           intermediate.velocities):
        mvs = dom.ops.M @ vs
        lhs += (dom.rho / dt) * float(vs @ mvs) + dom.mu * float(vs @ (dom.ops.K @ vs))
        rhs += (dom.rho / dt) * float(vn @ mvs)
        if dom.body_load is not None:
            rhs += float(dom.body_load(t_new) @ vs)
        if dom.pbar is not None:
            rhs -= float(dom.pbar(t_new)) * float(dom.ops.sigma @ vs)
    for spec, yn, ys in zip(system.circuits, previous.ys, intermediate.ys):
        U = spec.U(ys, t_new)
        lhs += float(ys @ (U * ys)) / dt
        rhs += float(yn @ (U * ys)) / dt
    for b in system.bindings:
        lhs += b.connection.resistance * intermediate.interfaces[b.interface_id].Q ** 2
    rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    return lhs, rhs, rel


@dataclass(frozen=True)
class Snapshot:
    t: float
    velocities: tuple
    pressures: tuple
    ys: tuple


def snapshot_of(state) -> Snapshot:
    return Snapshot(state.t, tuple(state.velocities), tuple(state.pressures),
                    tuple(state.ys))


@dataclass
class Trajectory:
    system: object
    snapshots: list

    def append_state(self, state) -> None:
        self.snapshots.append(snapshot_of(state))


@dataclass(frozen=True)
class ErrorReport:
    err_v: float
    err_p: float
    err_y: float
    period_index: Optional[int] = None


def periodicity_gap(traj: Trajectory, period_samples: int) -> float:
    """Relative squared distance between the last two recorded periods.

    A period vector concatenates period_samples + 1 consecutive snapshots;
    the squared norm of a period vector sums the squared spatial L2 norms
    (fields) or squared Euclidean norms (circuit states) of its snapshots,
    and the gap is the max over fields of the ratio of those sums.
    """
    n_per = int(period_samples)
    if n_per < 1:
        raise ValueError("period_samples must be >= 1")
    snaps = traj.snapshots
    if len(snaps) < 2 * n_per + 1:
        raise ValueError(f"need at least {2 * n_per + 1} snapshots "
                         f"(two full periods), have {len(snaps)}")
    cur = snaps[-(n_per + 1):]
    prev = snaps[-(2 * n_per + 1):-n_per]
    system = traj.system

    gaps = []
    for l, dom in enumerate(system.domains):
        for mat, pick in ((dom.ops.M, lambda s: s.velocities[l]),
                          (dom.ops.Mp, lambda s: s.pressures[l])):
            num = den = 0.0
            for sc, sp in zip(cur, prev):
                d = pick(sc) - pick(sp)
                num += float(d @ (mat @ d))
                den += float(pick(sp) @ (mat @ pick(sp)))
            if den <= 0.0:
                raise ZeroDivisionError("previous period has zero norm; "
                                        "degenerate periodicity reference")
            gaps.append(num / den)
    for m in range(len(system.circuits)):
        num = den = 0.0
        for sc, sp in zip(cur, prev):
            d = sc.ys[m] - sp.ys[m]
            num += float(d @ d)
            den += float(sp.ys[m] @ sp.ys[m])
        if den <= 0.0:
            raise ZeroDivisionError("previous period has zero norm; "
                                    "degenerate periodicity reference")
        gaps.append(num / den)
    return max(gaps)


def error_norms(traj: Trajectory, exact, dt: float) -> ErrorReport:
    """Normalized space-time errors of one recorded period against the
    exact solution, each snapshot weighted by dt:

      Err = sqrt( dt * sum_n sum_l ||u^n - u_ex(t^n)||^2 / ||u_ex(t^n)||^2 )

    with L2 norms for the fields (exact fields taken as their nodal
    interpolants) and U^{1/2}-weighted Euclidean norms for the circuit
    states, U evaluated at the respective state.
    """
    system = traj.system
    sum_v = sum_p = sum_y = 0.0
    for snap in traj.snapshots:
        t = snap.t
        for l, dom in enumerate(system.domains):
            uex = interpolate_velocity(dom.space, dom.mesh, exact.domains[l].velocity, t)
            pex = interpolate_pressure(dom.space, dom.mesh, exact.domains[l].pressure, t)
            du = snap.velocities[l] - uex
            dp = snap.pressures[l] - pex
            den_v = float(uex @ (dom.ops.M @ uex))
            den_p = float(pex @ (dom.ops.Mp @ pex))
            if den_v <= 0.0 or den_p <= 0.0:
                raise ZeroDivisionError(f"exact field norm vanishes at t={t}")
            sum_v += float(du @ (dom.ops.M @ du)) / den_v
            sum_p += float(dp @ (dom.ops.Mp @ dp)) / den_p
        for m, spec in enumerate(system.circuits):
            yex = exact.y(t)
            Uex = np.sqrt(spec.U(yex, t))
            Uh = np.sqrt(spec.U(snap.ys[m], t))
            dy = Uh * snap.ys[m] - Uex * yex
            den_y = float((Uex * yex) @ (Uex * yex))
            if den_y <= 0.0:
                raise ZeroDivisionError(f"exact state norm vanishes at t={t}")
            sum_y += float(dy @ dy) / den_y
    return ErrorReport(np.sqrt(dt * sum_v), np.sqrt(dt * sum_p), np.sqrt(dt * sum_y))


def convergence_rate(errors) -> float:
    """Least-squares slope of log(err) against log(dt)."""
    pts = [(float(dt), float(e)) for dt, e in errors]
    if len({dt for dt, _ in pts}) < 2:
        raise ValueError("need at least two distinct dt values")
    if any(e <= 0.0 for _, e in pts):
        raise ValueError("errors must be positive for a log-log fit")
    x = np.log([dt for dt, _ in pts])
    y = np.log([e for _, e in pts])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
