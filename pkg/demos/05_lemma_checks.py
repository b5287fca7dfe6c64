"""The comparison-lemma harness and its halved-constant validity run.

Runs every inequality check over the seeded random corpus, then reruns with
each comparison constant halved to demonstrate that the harness can fail.
The zoom-stability constant is the documented exception: it exceeds twice
the attainable supremum, so its halved version is still a true bound.
"""

import tangentia as tg

print("full-constant suite (20 trials each):")
for rep in tg.run_all(trials=20, seed=42):
    print(f"  [{'pass' if rep.passed else 'FAIL'}] {rep.name}: "
          f"lhs_max={rep.lhs_max:.4f} min_margin={rep.min_margin:.4f} "
          f"slack={rep.slack:.2e}")

print("\nhalved-constant validity run (10 trials each):")
for rep in tg.validity_suite(trials=10, seed=42):
    verdict = "violations found" if not rep.passed else "no violation possible"
    print(f"  {rep.name}: {verdict} (worst margin {rep.min_margin:.5f})")
