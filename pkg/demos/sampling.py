# Drawing heat-source layouts.
#
# Twelve rectangular components go into a 0.1 m square board on a 200 x 200
# cell grid.  Sequential sampling places them one at a time, each center drawn
# uniformly from the nodes still free; the Gibbs sampler instead moves one
# coordinate at a time along its feasible segments.  Both produce
# non-overlapping layouts, but their occupancy statistics differ.

import numpy as np

from hsld import (
    GibLSConfig,
    SeqLSConfig,
    Window,
    check_layout,
    feasible_segments,
    gibls_chain,
    seqls_batch,
    seqls_sample,
    special_sample,
)

# A batch of sequential samples.  Sample i is seeded from (base_seed, tag, i),
# so any single layout can be reproduced on its own.
layouts, attempts = seqls_batch(500, base_seed=1)
print(f"seqls: {len(layouts)} layouts in {attempts} attempts")
print("first layout:", layouts[0].centers())
check_layout(layouts[0])

# Where does component 12 (the largest) end up?  Its center can sit on nodes
# 24..176; a uniform draw lands within 30 nodes of either end 60/153 of the time.
xs = np.array([l.get(12).cx for l in layouts])
print("component 12 near the left/right walls:", np.mean((xs < 54) | (xs > 146)).round(3),
      "uniform:", round(60 / 153, 3))

# The Gibbs chain: burn in for 100 sweeps, then keep every 5th state.
rng = np.random.default_rng(2)
chain = gibls_chain(rng, GibLSConfig(n=500, burn_in=100, interval=5))
xs = np.array([l.get(12).cx for l in chain])
print("gibls, same statistic:", np.mean((xs < 54) | (xs > 146)).round(3))

# The conditional of one coordinate given the rest is a union of integer
# segments; this is what the chain resamples from.
print("feasible x-segments of component 12 in the last state:",
      feasible_segments(chain[-1], 12, "x"))

# Restricting all centers to a random 100 x 100 window makes placement much
# harder; each failure restarts the whole layout inside the same window.
rng = np.random.default_rng(3)
window = Window.random_square(100, rng)
result = seqls_sample(rng, SeqLSConfig(window=window.as_tuple()))
print(f"window {window.as_tuple()}: success after {result.attempts} attempt(s)")

# Special families used by the test splits.
for kind in ("corner", "group:G3", "half-x:40", "square:120"):
    layout = special_sample(kind, np.random.default_rng(4))
    check_layout(layout)
    c = np.array(list(layout.centers().values()))
    print(f"{kind:>11}: centers span x {c[:, 0].min()}..{c[:, 0].max()}, y {c[:, 1].min()}..{c[:, 1].max()}")
