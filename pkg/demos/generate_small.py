"""
Orderly generation
==================

Counts of nonisomorphic simple rank-3 matroids, all and integrally splitting,
followed by a census that the deficiency parity rule kills outright.
"""

import time

from r3matroids import MultiplicityVector, enumerate_multiplicity_vectors, generate_all

for n in range(3, 10):
    t0 = time.time()
    total = len(generate_all(n))
    split = len(generate_all(n, int_split=True))
    print(f"n={n:2d}  all {total:4d}  int-split {split:3d}  ({time.time() - t0:.1f}s)")

# censuses only: no block lists are built
print("int-split censuses at 13 and 14 points:",
      len(enumerate_multiplicity_vectors(13, True)), len(enumerate_multiplicity_vectors(14, True)))

# 21 triples, 3 four-point lines, one five-point line on 14 points: nothing survives
t0 = time.time()
print("census (0,21,3,1):", generate_all(14, MultiplicityVector(14, {3: 21, 4: 3, 5: 1})),
      f"{time.time() - t0:.1f}s")
