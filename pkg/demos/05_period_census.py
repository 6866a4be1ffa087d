"""Period statistics of random finite-state chains.

Every chain period satisfies 1 <= L <= (K+1)^d, and any value in that
range is attainable; in practice random ensembles sit far below the
ceiling.  The census samples (T, L) pairs for random shift-respecting
transition functions and for random stable linear recurrences run
through the quantization pipeline.
"""

import aporbit as ap

for K in (1, 3, 7):
    report = ap.period_census(d=2, K=K, ensemble=300, seed=42,
                              generator="random_map")
    stats = report.to_json()
    print(f"d=2, K={K}: state count {(K+1)**2:4d}, "
          f"mean L = {stats['mean_L']:6.2f}, "
          f"median L = {stats['median_L']:4.1f}, "
          f"max L = {stats['max_L']:3d}")

print()
report = ap.period_census(d=2, K=3, ensemble=300, seed=42,
                          generator="random_map")
print("d=2, K=3 histogram of periods (L: count):")
for L, count in report.histogram.items():
    print(f"  {L:3d}: {'#' * (count // 3)}{count}")

print()
ar_report = ap.period_census(d=2, K=3, ensemble=100, seed=9,
                             generator="random_ar")
stats = ar_report.to_json()
print(f"stable random recurrences, d=2, K=3: mean L = {stats['mean_L']:.2f}, "
      f"max L = {stats['max_L']} (orbits decay to a fixed state, so short "
      "cycles dominate)")
