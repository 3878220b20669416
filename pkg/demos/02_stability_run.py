"""Evolve a perturbed shock and watch the contraction machinery work.

A Gaussian velocity bump (amplitude 0.01, nonzero integral -- no zero-mass
condition) rides on the strength-0.05 wave. The run tracks the weighted
relative entropy, the dissipation functionals, the shift X(t) and its rate.
Shorten or lengthen via the first command-line argument (default t_final=200
to keep the demo around half a minute; the full acceptance run uses 1000).
"""

import sys
from pathlib import Path

from nskshock.diagnostics import decay_report, write_diagnostics_csv
from nskshock.harness import RunConfig, evolve

t_final = float(sys.argv[1]) if len(sys.argv) > 1 else 200.0
outdir = Path("02_stability_run_out")
outdir.mkdir(exist_ok=True)

cfg = RunConfig()
cfg.t_final = t_final
print(f"strength 0.05, gaussian u-bump amp {cfg.perturbation.amp_u}, t_final {t_final}")
result = evolve(cfg)
write_diagnostics_csv(result.records, outdir / "diagnostics.csv")

rep = decay_report(result.records)
r0, rT = result.records[0], result.records[-1]
print(f"\nrecords          : {rep.n_records}")
print(f"sup perturbation : {r0.sup_perturbation:.3e} -> {rT.sup_perturbation:.3e} (ratio {rep.sup_ratio:.3f})")
print(f"weighted entropy : {r0.rel_entropy_weighted:.3e} -> {rT.rel_entropy_weighted:.3e}")
print(f"entropy decreasing on {100 * rep.entropy_decrease_fraction:.1f}% of samples (after transient)")
print(f"gradient energy g: ratio {rep.g_ratio:.3f}")
print(f"shift X          : {rT.X:.4f}, rate |Xdot| final/max {rep.xdot_final_over_max:.3f}")
print(f"X growth slopes  : {rep.x_slope_first_third:.2e} (first third) -> {rep.x_slope_final_third:.2e} (final third)")
print(f"sublinear        : {rep.sublinear}")
print(f"\ndiagnostics CSV in {outdir}/")
