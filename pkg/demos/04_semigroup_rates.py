"""Heat semigroup errors across eps and t.

Each norm is a contour sum of resolvent differences.  The compensated
values (error divided by its predicted eps/t scaling) should stay flat;
this script uses a reduced grid and contour so it finishes in a couple of
minutes.  The acceptance tests run the finer version.
"""
from torushom.harness.analysis import fit_rate, uniformity_check
from torushom.harness.config import ExperimentConfig
from torushom.harness.sweep import run_sweep

cfg = ExperimentConfig.from_string("""
[problem]
preset = cos1d
[grid]
N = 256
[sweep]
eps_list = 1/4, 1/8, 1/16
eps_ref = 1/8
t_ref = 1
t_list = 0.05, 0.2, 1, 2
metrics = semi_diff, semi_corr, semi_grad_corr
theta = 1/16, 1/8, 1/4, 1/2
""")


def show(part):
    for r in part:
        print(f"{r.metric:<15} eps=1/{r.K:<3} t={r.t:<5g} norm={r.value:.3e} "
              f"compensated={r.compensated:.4f}")


records = run_sweep(cfg, progress=show)
for metric in ("semi_diff", "semi_corr", "semi_grad_corr"):
    fit = fit_rate(records, metric, "eps", {"t": 1.0})
    spread = uniformity_check(records, metric, "t", fixed={"eps": 1 / 8})
    print(f"{metric:<15} eps slope {fit.slope:+.3f}, spread over t {spread.ratio:.3f}")
