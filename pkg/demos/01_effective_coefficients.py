"""Effective coefficients of the built-in presets.

For g = a + cos(2 pi x) in one dimension the effective coefficient is the
harmonic mean sqrt(a^2 - 1).  In a layered 2-D medium the direction across
the layers sees the harmonic mean and the direction along them the
arithmetic mean.  The smooth checkerboard has no closed form; its
effective matrix sits between the harmonic and arithmetic means.
"""
import numpy as np

from torushom.cell import cell_residual, flux_gradient, homogenize
from torushom.harness.presets import make_problem, voigt_reuss

for preset in ("cos1d", "layered2d", "checker2d-smooth"):
    g, sym, oracle = make_problem(preset, a=2.0, cell_N=64)
    Lam, g0 = homogenize(g, sym)
    g0 = np.real_if_close(np.asarray(g0))
    print(f"\n{preset}: g0 =\n{np.round(g0, 12)}")
    if oracle is not None:
        print(f"  max deviation from the exact value: {np.max(np.abs(g0 - oracle)):.2e}")
    lo, hi = voigt_reuss(g)
    print(f"  harmonic mean {lo:.10f}, arithmetic mean {hi:.10f}")
    print(f"  cell solve: {Lam.iterations} CG steps, "
          f"equation residual {np.max(cell_residual(Lam, g, sym)):.1e}")

# In 1-D the corrector satisfies D Lambda = g0/g - 1.
g, sym, _ = make_problem("cos1d", a=2.0, cell_N=64)
Lam, g0 = homogenize(g, sym)
ratio = np.asarray(g0)[0, 0] / g.values[0, 0] - 1
print(f"\n1-D corrector check |D Lambda - (g0/g - 1)| = "
      f"{np.max(np.abs(flux_gradient(Lam, sym)[0, 0] - ratio)):.1e}")
