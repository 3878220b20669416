"""Run the standalone inequality battery and print the verdicts.

Covers the relative-quantity bounds, the weighted mean-deviation inequality
(with its exact equality case), the chord/curvature identity scaling, the
diffusion-coefficient scaling, and the completed-square kernel -- including
the negative control that corrupts the kernel constant on purpose.
"""

import json

from nskshock.harness import run_verify

report = run_verify()
for name, entry in report.items():
    if not isinstance(entry, dict):
        continue
    status = "pass" if entry["pass"] else "FAIL"
    detail = {k: v for k, v in entry.items() if k != "pass" and not isinstance(v, list)}
    print(f"[{status}] {name}: {json.dumps(detail, default=float)}")
print(f"\nall pass: {report['all_pass']}")

mutated = run_verify(flip_cstar_sign=True)
print(f"negative control (sign-flipped kernel constant) detected: {not mutated['g1_kernel']['pass']}")
