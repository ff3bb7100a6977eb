"""
A small record store
====================

Classify every integrally splitting matroid up to 9 points, write the store,
query it and run the freeness filter pipeline.  The same flow at 12 points
is ``r3matroids gen --n 12 --int-split``, then ``classify --battery
2,3,4,5,7,8,9,11,13,16`` and ``terao --n 12``.
"""

import os
import tempfile

from r3matroids import classify, generate_all, query, read_records, terao_pipeline, write_records
from r3matroids.store import seed_cache, tutte_unique_within

cache = seed_cache([])
recs = [classify(M, cache=cache) for n in range(3, 10) for M in generate_all(n, int_split=True)]
path = os.path.join(tempfile.mkdtemp(), "store.jsonl")
write_records(path, recs)
recs = list(read_records(path))
print(open(path).readline()[:120], "...")

print("supersolvable at 7:", query(recs, "n == 7 and supersolvable", count=True))
print("DF but not IF:", query(recs, "divisionally_free and not inductively_free", count=True))
for n in (7, 8, 9):
    print(n, terao_pipeline(recs, n).counts, "T-unique", tutte_unique_within(recs, n))
