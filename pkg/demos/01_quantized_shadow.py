"""Walk through the core pipeline on two small maps.

An orbit of a self-map of [-1,1]^d is snapped to a uniform grid (the
"shadow"), the observed state transitions become a finite table, and the
table run as a deterministic chain is eventually periodic: pre-period T,
period L.  The periodic tail is then an exact finite sum of sinusoids.
"""

import numpy as np

import aporbit as ap

# --- a rotation: new z = -previous z, with a delay slot ------------------
rot = ap.ar_map([0.0, -1.0])
y0 = ap.Point([1.0, 0.0])
grid = ap.GridSpec(K=2, d=2)

orbit, shadow, table, chain = ap.run_pipeline(rot, y0, grid, horizon=12)

print("rotation orbit (first 6 samples):")
for t in range(6):
    print(f"  t={t}: y={orbit.samples[t].coords} -> state {shadow[t].indices}")
print(f"visited states N={table.n_states}, conflicts={len(table.conflicts)}")
print(f"chain certificate: T={chain.pre_period}, L={chain.period}")

form = ap.fit_trig(chain)
print("harmonic coefficients (per coordinate):")
for m in range(form.harmonics + 1):
    print(f"  m={m}: a={np.round(form.a[m], 12)}, b={np.round(form.b[m], 12)}")
recon = ap.eval_trig(form, 5)
print(f"reconstruction at t=5: {np.round(recon, 12)} "
      f"(chain value {chain.value_at(5)})")

# --- a contracting recurrence: the chain settles on a fixed state --------
half = ap.ar_map([0.5])
orbit, shadow, table, chain = ap.run_pipeline(
    half, ap.Point([0.8]), ap.GridSpec(K=8, d=1), horizon=40
)
print("\ncontracting map z -> z/2 at K=8:")
print(f"  shadow head: {[s.indices[0] for s in shadow[:8]]}")
print(f"  T={chain.pre_period}, L={chain.period} "
      f"(fixed state {chain.state_at(chain.pre_period).indices})")
print(f"  conflicts: {len(table.conflicts)} "
      "(distinct orbit points can merge on a coarse grid)")
