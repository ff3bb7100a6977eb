"""
Evaluating recursive iterators with a worker pool
=================================================

Workers pull the deepest pending iterator, push leaves into a bounded FIFO and
close it with one sentinel when the job counter reaches zero.
"""

from r3matroids import iter_generate, leaf_iterator
from r3matroids.parallel import MagmaEvaluation, MatchedParentheses

# Catalan numbers two ways
print(len(list(leaf_iterator(MatchedParentheses(5), workers=4))))
stream = leaf_iterator(MagmaEvaluation(3), workers=2, capacity=1)
while not stream.is_done():
    print(" ", stream.next())

# the matroid generator rides on the same scheduler
for w in (1, 4):
    print(w, "workers:", len(list(iter_generate(10, workers=w, int_split=True))), "matroids")
