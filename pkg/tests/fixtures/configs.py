"""
Run configuration texts for CLI tests.
"""

BARENBLATT_1D = """\
[mesh]
box = -2 2
cells = 32

[time]
T = 0.1
n = 16

[model]
q = 2
u0 = barenblatt
t0 = 0.1

[convergence]
levels = 3
coupling = h
"""

CONSTANT_1D = """\
[mesh]
box = 0 1
cells = 8

[time]
T = 0.1
n = 4

[model]
q = 2
u0 = constant
value = 0.7
"""

MISSING_Q = """\
[mesh]
box = 0 1
cells = 8

[time]
T = 0.1
n = 4

[model]
u0 = constant
"""

HEAT_SINE_1D = """\
[mesh]
box = 0 1
cells = 8

[time]
T = 0.05
n = 2

[model]
q = 1
u0 = heat_sine

[convergence]
levels = 3
coupling = h2
sampling = nodal
"""

BOX_2D_KRYLOV = """\
[mesh]
box = 0 1 0 1
cells = 6 6

[time]
T = 0.01
n = 4

[model]
q = 3
u0 = box
lo = 0.25 0.25
hi = 0.5 0.75

[solver]
linear_solver = krylov
time_rule = euler
"""


def with_output(text: str, prefix: str = "run") -> str:
    """Append an output section with a prefix."""
    return text + f"\n[output]\nprefix = {prefix}\n"
