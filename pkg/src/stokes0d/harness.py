"""Experiment drivers: periodic runs, stability sweeps, convergence studies.

A simulation is driven period by period (dt = tau / N_tau) against a
streaming periodicity criterion: the squared relative distance between the
latest two period vectors must fall under eps_per.  Once periodic, the last
recorded period feeds the normalized error norms.  The stability driver
checks the per-step energy chain of the splitting scheme and audits the
stage-1 energy identity; the convergence driver sweeps dt and fits the
log-log slope.
"""
from __future__ import annotations

import dataclasses
from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import splitting
from .analysis import (EnergyReport, ErrorReport, Trajectory, convergence_rate,
                       energy_report, error_norms, snapshot_of,
                       step1_energy_residual)
from .cases import Case
from .splitting import StepConfig


def periods_per_tau(tau: float, dt: float) -> int:
    n = int(round(tau / dt))
    if n < 1 or abs(n * dt - tau) > 1e-9 * tau:
        raise ValueError(f"dt={dt} does not divide the period tau={tau}")
    return n


class _PeriodTracker:
    """Streams snapshots and accumulates the per-period gap terms.

    Keeps the latest N_tau + 1 snapshots; when snapshot i arrives, its
    counterpart one period earlier is the head of the buffer, and the pair
    contributes to every period vector containing index i (period
    boundaries belong to both neighbours).
    """

    def __init__(self, system, n_per: int):
        self.system = system
        self.n_per = n_per
        self.buffer = deque(maxlen=n_per + 1)
        self.count = 0
        self.acc = {}
        self.gaps = {}

    def _groups(self, snap, prev):
        sys_ = self.system
        for l, dom in enumerate(sys_.domains):
            d = snap.velocities[l] - prev.velocities[l]
            yield float(d @ (dom.ops.M @ d)), float(
                prev.velocities[l] @ (dom.ops.M @ prev.velocities[l]))
            d = snap.pressures[l] - prev.pressures[l]
            yield float(d @ (dom.ops.Mp @ d)), float(
                prev.pressures[l] @ (dom.ops.Mp @ prev.pressures[l]))
        for m in range(len(sys_.circuits)):
            d = snap.ys[m] - prev.ys[m]
            yield float(d @ d), float(prev.ys[m] @ prev.ys[m])

    def push(self, state) -> None:
        snap = snapshot_of(state)
        self.buffer.append(snap)
        i = self.count
        self.count += 1
        if i < self.n_per:
            return
        prev = self.buffer[0]
        pairs = list(self._groups(snap, prev))
        periods = [i // self.n_per, i // self.n_per + 1] if i % self.n_per == 0 \
            else [i // self.n_per + 1]
        for p in periods:
            if p < 2:
                continue
            acc = self.acc.setdefault(p, np.zeros((len(pairs), 2)))
            acc += np.asarray(pairs)
        if i % self.n_per == 0 and i // self.n_per >= 2:
            p = i // self.n_per
            acc = self.acc.pop(p)
            if np.any(acc[:, 1] <= 0.0):
                raise ZeroDivisionError("previous period has zero norm; "
                                        "degenerate periodicity reference")
            self.gaps[p] = float(np.max(acc[:, 0] / acc[:, 1]))

    def last_period_trajectory(self) -> Trajectory:
        return Trajectory(self.system, list(self.buffer))


@dataclass
class SeriesRow:
    t: float
    interfaces: dict          # interface_id -> InterfaceValues
    ys: list
    energy: EnergyReport


@dataclass
class SimulateResult:
    case: Case
    dt: float
    s_sub: int
    n_tau: int
    converged: bool
    periods: int
    gaps: dict
    series: list
    trajectory: Optional[Trajectory]
    final_state: object
    errors: Optional[ErrorReport] = None

    @property
    def final_gap(self) -> Optional[float]:
        return self.gaps[max(self.gaps)] if self.gaps else None


def run_to_periodicity(case: Case, dt: float, s_sub: int | None = None,
                       eps_per: float = 1e-6, max_periods: int = 10,
                       collect_series: bool = True, compute_errors: bool = True,
                       extra_observers=()) -> SimulateResult:
    """Advance whole periods until the periodicity gap drops under eps_per.

    With max_periods = 0 the initial state is reported and nothing runs.
    """
    system = case.system
    n_tau = periods_per_tau(case.tau, dt)
    s_sub = s_sub if s_sub is not None else case.s_sub
    config = StepConfig(dt, s_sub)
    state = case.initial_state()
    dt_fd = 1e-6 * case.tau

    series: list = []

    def record_series(t, interfaces, ys, state_for_energy):
        series.append(SeriesRow(t, dict(interfaces), [y.copy() for y in ys],
                                energy_report(system, state_for_energy, dt_fd)))

    if collect_series:
        record_series(0.0, state.interfaces, state.ys, state)
    if max_periods == 0:
        return SimulateResult(case, dt, s_sub, n_tau, False, 0, {}, series, None, state)

    tracker = _PeriodTracker(system, n_tau)
    tracker.push(state)

    def on_step(record):
        tracker.push(record.state)
        if collect_series:
            record_series(record.t, record.interfaces, record.ys, record.state)
        for obs in extra_observers:
            obs(record)

    converged = False
    periods = 0
    for p in range(1, max_periods + 1):
        state = splitting.run(system, state, config, n_tau, observers=(on_step,))
        periods = p
        gap = tracker.gaps.get(p)
        if gap is not None and gap < eps_per:
            converged = True
            break

    traj = tracker.last_period_trajectory() if periods >= 1 else None
    errors = None
    if converged and compute_errors:
        errors = dataclasses.replace(error_norms(traj, case.exact, dt),
                                     period_index=periods)
    return SimulateResult(case, dt, s_sub, n_tau, converged, periods,
                          dict(tracker.gaps), series, traj, state, errors)


@dataclass
class StabilityReport:
    dt: float
    n_steps: int
    e0: float
    max_increase: float         # max over n of E^{n+1} - E^n
    chain_violation: float      # max violation of E^{n+1} <= E^{n+1/2} <= E^n
    max_identity_residual: float

    def passed(self, slack: float = 1e-12) -> bool:
        tol = slack * self.e0
        return self.max_increase <= tol and self.chain_violation <= tol


def stability_run(case: Case, dt: float, n_steps: int, s_sub: int | None = None,
                  explicit_pi: bool = False) -> StabilityReport:
    """Track the energy chain over an unforced run from exact initial data."""
    system = case.system
    s_sub = s_sub if s_sub is not None else case.s_sub
    config = StepConfig(dt, s_sub)
    state = case.initial_state()

    def total(st):
        rep = energy_report(system, st)
        return rep.total

    e_prev = total(state)
    e0 = e_prev
    max_inc = -np.inf
    chain_viol = -np.inf
    max_resid = 0.0

    def on_step(record):
        nonlocal e_prev, max_inc, chain_viol, max_resid
        e_mid = total(record.intermediate)
        e_new = total(record.state)
        max_inc = max(max_inc, e_new - e_prev)
        chain_viol = max(chain_viol, e_mid - e_prev, e_new - e_mid)
        _, _, rel = step1_energy_residual(system, record.previous,
                                          record.intermediate, config.dt)
        max_resid = max(max_resid, rel)
        e_prev = e_new

    splitting.run(system, state, config, n_steps, observers=(on_step,),
                  explicit_pi=explicit_pi)
    return StabilityReport(dt, n_steps, e0, max_inc, chain_viol, max_resid)


@dataclass
class ConvergenceResult:
    rows: list                  # (dt, ErrorReport, periods, converged)
    slopes: dict                # "v" / "p" / "y" -> fitted slope, when >= 2 rows

    def errors(self, which: str):
        key = {"v": "err_v", "p": "err_p", "y": "err_y"}[which]
        return [(dt, getattr(err, key)) for dt, err, _, _ in self.rows]


def convergence_study(case_builder, dt_list, eps_per: float = 1e-6,
                      max_periods: int = 10, s_sub: int | None = None,
                      collect_series: bool = False, on_result=None) -> ConvergenceResult:
    """Run simulate-to-periodicity for each dt and fit log-log slopes.

    `case_builder()` must return a fresh Case (runs are independent);
    `on_result(dt, SimulateResult)` is called after each run when given.
    """
    dts = [float(dt) for dt in dt_list]
    if len(dts) != len(set(dts)):
        raise ValueError(f"duplicate dt values: {dts}")
    rows = []
    for dt in sorted(dts, reverse=True):
        case = case_builder()
        res = run_to_periodicity(case, dt, s_sub=s_sub, eps_per=eps_per,
                                 max_periods=max_periods,
                                 collect_series=collect_series)
        if not res.converged:
            raise RuntimeError(f"no periodicity within {max_periods} periods "
                               f"at dt={dt} (last gap {res.final_gap})")
        rows.append((dt, res.errors, res.periods, res.converged))
        if on_result is not None:
            on_result(dt, res)
    slopes = {}
    if len(rows) >= 2:
        for which in ("v", "p", "y"):
            key = {"v": "err_v", "p": "err_p", "y": "err_y"}[which]
            slopes[which] = convergence_rate(
                [(dt, getattr(err, key)) for dt, err, _, _ in rows])
    return ConvergenceResult(rows, slopes)


def peak_errors(result: SimulateResult, interface_id) -> dict:
    """Relative peak errors of P and Q over the last recorded period.

    peak error = max_n |x^n - x_ex(t^n)| / max_n |x_ex(t^n)|, maximum over
    the snapshots of the final period.
    """
    if not result.converged or not result.series:
        raise ValueError("needs a converged run with a recorded series")
    n_tau = result.n_tau
    rows = result.series[-(n_tau + 1):]
    ie = result.case.exact.interfaces[interface_id]
    p_num = q_num = p_den = q_den = 0.0
    for row in rows:
        vals = row.interfaces[interface_id]
        pex, qex = float(ie.P(row.t)), float(ie.Q(row.t))
        p_num = max(p_num, abs(vals.P - pex))
        q_num = max(q_num, abs(vals.Q - qex))
        p_den = max(p_den, abs(pex))
        q_den = max(q_den, abs(qex))
    return {"P": p_num / p_den, "Q": q_num / q_den}
