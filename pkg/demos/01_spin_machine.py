"""
Spin measurements from a single charge draw
===========================================

A state on the unit sphere is measured along a chosen axis by drawing one
uniform charge fraction and comparing it against sin(theta/2)^2, where
theta is the angle between state and axis.  Averaged over many draws the
up rate lands on cos(theta/2)^2, the same law a spin-half particle obeys.
"""

import math

import numpy as np

from tencards import BlochPoint, RandomSource, bloch_to_density, spin_measurement_batch

# A few states: the north pole, the equator, and a tilted state.
states = {
    "north pole": BlochPoint(1.0, 0.0, 0.0),
    "equator": BlochPoint(1.0, math.pi / 2, 0.0),
    "tilted": BlochPoint(1.0, 2 * math.pi / 3, math.pi / 4),
}

print("density matrices")
for name, point in states.items():
    rho = bloch_to_density(point)
    print(f"  {name:<11}", np.round(rho, 4).tolist())

# Measure each state along the z axis a million times and compare the
# empirical up rate with the closed-form law.
north = (0.0, 0.0, 1.0)
n = 1_000_000
print(f"\nup rates along z over {n:,} draws")
print(f"  {'state':<11} {'empirical':>10} {'cos^2(theta/2)':>15} {'diff':>10}")
for i, (name, point) in enumerate(states.items()):
    flags = spin_measurement_batch(point, north, n, RandomSource(100 + i))
    law = math.cos(point.theta / 2.0) ** 2
    emp = flags.mean()
    print(f"  {name:<11} {emp:>10.4f} {law:>15.4f} {abs(emp - law):>10.2e}")

# Interior points (r < 1) describe mixed states the machine cannot build;
# asking for one raises UnsupportedStateError.
from tencards import UnsupportedStateError

try:
    spin_measurement_batch(BlochPoint(0.5, 0.0, 0.0), north, 1, RandomSource(0))
except UnsupportedStateError as err:
    print(f"\ninterior state rejected: {err}")
