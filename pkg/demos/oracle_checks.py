"""Self-consistency audit of the closed-form benchmark solutions.

Every benchmark ships an exact solution with analytic time derivatives.
Before trusting them as error references, this script substitutes them
back into the circuit ODE, the pressure/flow coupling relations and the
discrete momentum equation, and prints the residuals: the algebraic checks
should sit at rounding level, the weak-form residual at the O(h^2)
interpolation level of the mesh.
"""
import numpy as np

from stokes0d import build_case, verify_exact

for example, nonlinear in ((1, False), (1, True), (2, False), (3, False)):
    case = build_case(example, nonlinear=nonlinear, nx=50, ny=10)
    times = np.linspace(0.0, case.tau, 100, endpoint=False)
    rep = verify_exact(case.system, case.exact, times)
    label = f"benchmark {example}" + (" (nonlinear)" if nonlinear else "")
    print(label)
    for name, value in rep.rows():
        print(f"  {name:32s} {value:.3e}")
    print(f"  (mesh h = {rep.mesh_h:.2f}, h^2 = {rep.mesh_h ** 2:.2e})")
