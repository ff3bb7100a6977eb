"""
Lines, censuses and freeness
============================

A simple rank-3 matroid is a list of lines (blocks) covering every pair of
points exactly once.  Its census of line sizes fixes the characteristic and
Tutte polynomials; freeness needs the lines themselves.
"""

from r3matroids import (braid_a3, char_poly_via_tutte, characteristic_data, example_m1,
                        example_m2, is_divisionally_free, is_inductively_free,
                        is_supersolvable, make_matroid, multiplicity_vector, tutte)

# the braid arrangement: four 3-point lines and three 2-point lines on 6 points
A3 = make_matroid(6, [{1, 2, 4}, {1, 3, 5}, {2, 3, 6}, {4, 5, 6}, {3, 4}, {2, 5}, {1, 6}])
assert A3 == braid_a3()
mv = multiplicity_vector(A3)
print("census", mv.m, "roots", characteristic_data(mv).split)
print("chi(t) coefficients", char_poly_via_tutte(A3))
print("T(x, y) =", tutte(A3))

# two 11-point matroids with the same census, hence the same polynomials
M1, M2 = example_m1(), example_m2()
assert multiplicity_vector(M1) == multiplicity_vector(M2)
assert tutte(M1) == tutte(M2)
for name, M in [("M1", M1), ("M2", M2)]:
    print(name, "SS", is_supersolvable(M), "IF", is_inductively_free(M),
          "DF", is_divisionally_free(M))
