"""
Representations over small fields
=================================

Search for a 3 x n matrix whose singular column triples are exactly the
triples on a line.  "none" is a proof for that field only.
"""

from r3matroids import (DEFAULT_BATTERY, FieldSpec, check_representation, example_dfnif, fano,
                        find_representation, projective_pattern, representability_summary)

P = projective_pattern(fano())
print("basis", P.basis, "free entries", P.free_count)
res, _ = representability_summary(fano())
print("Fano:", " ".join(f"{r.field}:{r.outcome}" for r in res))

X = example_dfnif()
r = find_representation(X, FieldSpec(13))
for row in r.matrix:
    print(" ".join(f"{v:2d}" for v in row))
assert check_representation(X, r.matrix, FieldSpec(13))
print("14-point example over", [str(f) for f in DEFAULT_BATTERY if find_representation(X, f).found])
