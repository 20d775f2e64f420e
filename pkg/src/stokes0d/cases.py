"""Ready-to-run systems for the three benchmark configurations.

Geometry of the channels (walls top and bottom in all cases):

  benchmark 1   one channel, external pressure side left, interface right
  benchmark 2   two channels back to back through one circuit: channel 1 as
                in benchmark 1, channel 2 with the interface left and the
                external side right
  benchmark 3   one channel inside a closed circuit, interfaces on both
                vertical sides, no external side
"""
from __future__ import annotations

from dataclasses import dataclass

from . import circuits as circ
from . import mesh as msh
from .exact import ExactSolutionSet, exact_for
from .fem import (TimeSeparableLoad, assemble_operators, build_space,
                  interpolate_pressure, interpolate_velocity)
from .params import params_for
from .splitting import (CoupledState, CoupledSystem, Domain, InterfaceBinding,
                        InterfaceValues)

DEFAULT_SUBSTEPS = {1: 5, 2: 10, 3: 10}


def _layouts(example: int):
    if example == 1:
        return [{
            "left": msh.external(), "right": msh.interface(1, 1, 1),
            "top": msh.wall(), "bottom": msh.wall(),
        }]
    if example == 2:
        return [
            {"left": msh.external(), "right": msh.interface(1, 1, 1),
             "top": msh.wall(), "bottom": msh.wall()},
            {"left": msh.interface(2, 1, 1), "right": msh.external(),
             "top": msh.wall(), "bottom": msh.wall()},
        ]
    if example == 3:
        return [{
            "left": msh.interface(1, 1, 2), "right": msh.interface(1, 1, 1),
            "top": msh.wall(), "bottom": msh.wall(),
        }]
    raise ValueError(f"example must be 1, 2 or 3, got {example}")


def _circuit(example, p, exact: ExactSolutionSet, zero_forcing: bool, nonlinear: bool):
    gen = (lambda name: None) if zero_forcing else exact.generators.get
    if example == 1:
        return circ.example1_circuit(p, nonlinear, gen("p_tilde"))
    if example == 2:
        return circ.example2_circuit(p, gen("p_tilde"))
    return circ.example3_circuit(p, gen("p_tilde_a"), gen("p_tilde_b"))


@dataclass
class Case:
    example: int
    nonlinear: bool
    params: object
    system: CoupledSystem
    exact: ExactSolutionSet
    s_sub: int

    @property
    def tau(self) -> float:
        return self.exact.tau

    def initial_state(self) -> CoupledState:
        """Exact solution at t = 0 (also used for the unforced stability runs)."""
        vels, prs = [], []
        for dom, dex in zip(self.system.domains, self.exact.domains):
            vels.append(interpolate_velocity(dom.space, dom.mesh, dex.velocity, 0.0))
            prs.append(interpolate_pressure(dom.space, dom.mesh, dex.pressure, 0.0))
        ys = [self.exact.y(0.0)]
        ifs = {iid: InterfaceValues(float(ie.P(0.0)), float(ie.Q(0.0)), float(ie.pi(0.0)))
               for iid, ie in self.exact.interfaces.items()}
        return CoupledState(vels, prs, ys, ifs, 0.0)


def build_case(example: int, *, nonlinear: bool = False, nx: int = 100, ny: int = 20,
               params=None, zero_forcing: bool = False, load_degree: int = 6) -> Case:
    """Assemble mesh, spaces, operators, circuit and exact solution.

    `zero_forcing` nulls body forces, external pressures and generators
    while keeping the same operators and exact initial data; with constant
    circuit coefficients that is the setting in which the total discrete
    energy must decay monotonically for every time step.
    """
    if nonlinear and example != 1:
        raise ValueError("only example 1 has a nonlinear variant")
    p = params if params is not None else params_for(example)
    exact = exact_for(example, nonlinear=nonlinear, params=p)

    domains = []
    for layout, dex in zip(_layouts(example), exact.domains):
        mesh = msh.build_rect_mesh(msh.RectDomain(p.L, p.H), nx, ny, layout)
        space = build_space(mesh)
        ops = assemble_operators(space, mesh)
        if zero_forcing:
            body_load, pbar = None, None
        else:
            rho = p.rho
            terms = [(lambda t, c=c: rho * c(t), g) for c, g in dex.force_terms]
            body_load = TimeSeparableLoad(space, mesh, terms, degree=load_degree)
            pbar = dex.pbar
        domains.append(Domain(mesh, space, ops, p.rho, p.mu, body_load, pbar))

    circuit = _circuit(example, p, exact, zero_forcing, nonlinear)
    bindings = [InterfaceBinding(c.interface_id, c.interface_id[0] - 1, 0, c)
                for c in circuit.connections]
    system = CoupledSystem(domains, [circuit], bindings)
    return Case(example, nonlinear, p, system, exact, DEFAULT_SUBSTEPS[example])
