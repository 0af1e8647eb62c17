# measuring particle speeds on one certified window, then checking batch
# frequencies against their exact limits
#
# The step process starts from the ordered configuration (label i at site i)
# and runs under the fully asymmetric driver: at each bond event the two
# neighbours sort in decreasing order, so smaller labels drift right.  A
# finite window only represents the infinite system up to the contamination
# fronts coming in from its edges; every run returns a certificate interval,
# and positions strictly inside it are exact.
import numpy as np

import speedlab as sl

rng = np.random.default_rng(20260814)

# --- one run, by hand -----------------------------------------------------
# window wide enough for horizon 60: fronts travel ~t plus fluctuations
t = 60.0
pad = sl.default_pad(t)
config = sl.canonical_config(-8 - pad, 17 + 2 * pad)
noise = sl.NoiseField.for_window(config.lo, config.length, t, rng=rng)
sim = sl.simulate(config, noise, mode="tasep")

print("window:", (config.lo, config.hi), "events:", sim.events)
print("certificate:", (sim.certificate.left, sim.certificate.right))

est = sl.estimate_speeds(sim, particles=range(-8, 9))
print("label -8..8 speeds:", np.round([est.speed(k) for k in range(-8, 9)], 3))

# neighbouring labels that end with nearly equal speeds form convoys;
# the default closeness threshold shrinks like t^(-1/4)
convoys = sl.detect_convoys(est, sl.default_convoy_delta(t))
print("convoy sizes at horizon", int(t), ":", convoys.sizes().tolist())

# the empirical measure puts mass 1/n at each (label/t, speed) point
measure = sl.EmpiricalMeasure.from_estimate(est)
print("total mass:", measure.total_mass())

# --- batch frequencies vs exact limits -------------------------------------
# 400 replicas of labels 0..3 to horizon 60.  Two checks:
#   * P(label 0 ends right of label 1) approaches 2/3 from below,
#   * which of labels 1,2,3 ends rightmost approaches (1/2, 3/10, 1/5).
batch = sl.run_endpoint_batch("tasep", -3 * int(t), 3 * int(t) + 3, t, 400,
                              [0, 1, 2, 3], seed=rng)
assert batch.certified().all()

swapped = float(np.mean(batch.positions[:, 0] > batch.positions[:, 1]))
print(f"\nP(swapped) at t={int(t)}: {swapped:.3f}   (limit 2/3, from below)")

winner = np.argmax(batch.positions[:, 1:], axis=1)
freq = np.bincount(winner, minlength=3) / batch.positions.shape[0]
exact = [sl.rightmost_prob(3, k) for k in (1, 2, 3)]
print("rightmost of three:", np.round(freq, 3).tolist(),
      " vs exact", np.round(exact, 3).tolist())

# speeds of a single label converge to the uniform law on [-1, 1]; at this
# short horizon the histogram is already flat in the bulk but keeps a few
# percent of diffusive overshoot just outside the edges
u = batch.speeds()[:, 0]
inside = float(np.mean(np.abs(u) <= 1.0))
print(f"single-label speed: mean {u.mean():+.3f}, share inside [-1,1] {inside:.3f}")
