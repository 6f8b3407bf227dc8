"""
Equilibria as the shared state changes
======================================

In the classical limit (a_sq = 1) the Battle of the Sexes keeps its two
pure equilibria and the interior mixed point.  Tuning a_sq moves the
mixed point; at a_sq = 1/2 the pure corners dissolve and the game turns
symmetric.  A brute-force grid scan confirms each closed-form answer.
"""

from tencards import EntangledState, PayoffMatrix, equilibrium_oracle_grid, nash_equilibria

bos = PayoffMatrix(alpha=5.0, beta=3.0, gamma=1.0)

for a_sq in (1.0, 0.75, 0.5):
    state = EntangledState(a_sq)
    print(f"a_sq = {a_sq}")
    for eq in nash_equilibria(state, bos):
        pa, pb = eq.payoffs
        extra = ""
        if eq.p_range is not None:
            extra = f"  (p range {eq.p_range}, q range {eq.q_range})"
        print(
            f"  {eq.kind:<9} p={eq.profile.p:.4f} q={eq.profile.q:.4f}"
            f"  payoffs ({pa:.4f}, {pb:.4f}){extra}"
        )

    # The oracle scans a 0.01 grid for mutual best responses and for
    # best-response crossings, then matches cells against closed forms.
    grid = equilibrium_oracle_grid(state, bos, step=0.01)
    cells = ", ".join(f"({x:.2f}, {y:.2f})" for x, y in grid.cells)
    print(f"  grid cells: {cells}")
    print(f"  grid and closed forms agree: {grid.matched}\n")
