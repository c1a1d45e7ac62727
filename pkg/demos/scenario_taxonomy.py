"""Walk through the scenario taxonomy for confusing-change detection.

Classifies the three standard Gaussian presets, prints their KL
divergences and drift signs, then maps the scenario regions over a grid
of (confusing, bad) means to show where each single-statistic baseline
stops being enough.

Run:  python3 demos/scenario_taxonomy.py
"""

import numpy as np

from confusum import Gaussian, classify, scenario_preset

print("Standard presets")
print("=" * 64)
for which in (1, 2, 3):
    pre, confusing, bad = scenario_preset(which)
    report = classify(pre, confusing, bad)
    print(f"\npreset {which}: pre={pre.label}  confusing={confusing.label}  bad={bad.label}")
    print(f"  D(bad||pre)        = {report.kl_bad_pre.value:.4f} nats")
    print(f"  D(bad||confusing)  = {report.kl_bad_confusing.value:.4f} nats")
    print(f"  drift of the detect statistic under the confusing model: "
          f"{report.drift_w_under_confusing:+.4f}")
    print(f"  drift of the isolate statistic under the pre-change model: "
          f"{report.drift_lam_under_pre:+.4f}")
    print(f"  -> scenario {int(report.scenario)}")

# A positive drift means the statistic climbs and eventually crosses any
# threshold, so scenario 3 (both drifts positive) defeats both baselines.

print("\nScenario map over (confusing mean, bad mean), pre-change N(0,1)")
print("=" * 64)
means = np.linspace(-2, 2, 17)
pre = Gaussian(0, 1)
header = "      " + " ".join(f"{mb:+.2f}"[:5] for mb in means)
print(header)
for mc in means:
    cells = []
    for mb in means:
        if mc == 0 or mb == 0 or mc == mb:
            cells.append("  .  ")
            continue
        label = int(classify(pre, Gaussian(float(mc), 1), Gaussian(float(mb), 1)).scenario)
        cells.append(f"  {label}  ")
    print(f"{mc:+.2f}" + "".join(cells))
print("\nrows: confusing mean, columns: bad mean, '.': degenerate (equal models)")
