# the projected stationary law through the tandem-queue collapse
#
# Projecting labels to finitely many classes turns the stationary law into
# something samplable: independent Bernoulli lines feed a column-by-column
# tandem of queues (arrivals enqueue, services pop or emit the next class),
# and the emitted classes are the stationary configuration.
import numpy as np

import speedlab as sl
from speedlab.harness import WORKED_LINES, WORKED_OUTPUT

rng = np.random.default_rng(20260814)

# --- the worked example, with its queue trace -------------------------------
output, queues, trace = sl.collapse(WORKED_LINES, return_trace=True)
print("lines:")
for row in WORKED_LINES:
    print("  ", row.tolist())
print("collapsed classes:", tuple(int(c) for c in output),
      " (expected", WORKED_OUTPUT, ")")
print("queue counts after each column (rightmost column first):")
for step, state in enumerate(trace):
    print(f"  step {step}: {tuple(tuple(row) for row in state)}")

# --- sampled pair frequencies vs closed forms --------------------------------
# class densities (0.3, 0.3, 0.4) mean line densities x1 = 0.3, x2 = 0.6;
# adjacent-pair frequencies involving the middle class have product forms
densities = (0.3, 0.3, 0.4)
x1, x2 = 0.3, 0.6
seqs = sl.sample_stationary_batch(densities, 201, 2000, rng=rng)

targets = {
    (1, 2): x1 * x2 * (x2 - x1),
    (2, 2): (1.0 - x1) * x2 * (x2 - x1),
    (3, 2): (1.0 - x2) * (x2 - x1),
}
print("\nadjacent-pair frequencies on 2000 x 200 sampled pairs:")
for (a, b), target in targets.items():
    freq = float(np.mean((seqs[:, :-1] == a) & (seqs[:, 1:] == b)))
    print(f"  pair ({a},{b}): {freq:.4f}  vs exact {target:.4f}")

# single-site marginals recover the class densities themselves
marginals = [float(np.mean(seqs == c)) for c in (1, 2, 3)]
print("site marginals:", np.round(marginals, 3).tolist(), " vs", densities)

# --- the empty-queue probability ---------------------------------------------
# the chance that the (single) queue between two lines is empty at a column
# has the closed form (x2 - x1) / ((1 - x1) x2) = 5/7 at these densities
exact = sl.empty_queue_prob([x1, x2])
est = sl.empty_queue_prob_estimate(densities, samples=4000, rng=rng)
print(f"\nempty-queue probability: {est:.4f}  vs exact {exact:.4f}")
