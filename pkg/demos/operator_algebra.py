# the update operators as exact stochastic matrices on a small system
#
# On m labels every update is a Markov kernel on the m! orderings: sort and
# antisort are deterministic 0/1 matrices, the transpose swaps a bond's
# neighbours, and the randomized update pi mixes transpose and sort with
# weights q = (1-p)/p and 1-q.  Working with the full matrices makes the
# algebra checkable to machine precision instead of statistically.
import numpy as np

import speedlab as sl

m = 4
print(f"orderings of {m} labels: {len(sl.permutation_order(m))}")

for p in (0.6, 0.75, 1.0):
    q = (1.0 - p) / p
    worst_quad = worst_comm = worst_braid = 0.0
    for n in range(m - 1):
        pi = sl.OperatorMatrix.pi(m, n, p).dense()
        # quadratic identity: applying the same bond twice has no new effect
        # beyond a q-weighted retry, pi^2 = q I + (1-q) pi
        rhs = q * np.eye(pi.shape[0]) + (1.0 - q) * pi
        worst_quad = max(worst_quad, float(np.abs(pi @ pi - rhs).max()))
    a, c = sl.OperatorMatrix.pi(m, 0, p).dense(), sl.OperatorMatrix.pi(m, 2, p).dense()
    worst_comm = float(np.abs(a @ c - c @ a).max())
    for n in (0, 1):
        a = sl.OperatorMatrix.pi(m, n, p).dense()
        b = sl.OperatorMatrix.pi(m, n + 1, p).dense()
        worst_braid = max(worst_braid, float(np.abs(a @ b @ a - b @ a @ b).max()))
    print(f"p={p}: quadratic {worst_quad:.2e}, distant commutation "
          f"{worst_comm:.2e}, braid {worst_braid:.2e}")

# --- word reversal ----------------------------------------------------------
# Applying a word of bond updates left-to-right or right-to-left gives
# different chains, but their output laws match after inverting the ordering
# (reading positions-of-labels as labels-at-positions).  Exact enumeration:
word = [1, 0, 2, 1, 0]
for p in (0.75, 1.0):
    fwd = sl.exact_word_distribution(word, m, p)
    rev = sl.inversion_pushforward(sl.exact_word_distribution(word[::-1], m, p), m)
    print(f"word {word} at p={p}: reversal residual {np.abs(fwd - rev).max():.2e}")

# the five most likely orderings after the word, at p = 0.75
dist = sl.exact_word_distribution(word, m, 0.75)
order = sl.permutation_order(m)
top = np.argsort(dist)[::-1][:5]
print("\nmost likely orderings after the word (p = 0.75):")
for idx in top:
    print("  ", "".join(map(str, order[idx])), f"{dist[idx]:.4f}")
