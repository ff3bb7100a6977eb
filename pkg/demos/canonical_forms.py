"""
Minimal images
==============

Relabel the Fano plane at random and watch every copy collapse to the same
minimal image; the stabilizer is the automorphism group of order 168.
"""

import random

from r3matroids import apply, blocklist_stabilizer, canonical_form, fano
from r3matroids.permgroup import Permutation

F = fano()
rnd = random.Random(0)
forms = set()
for _ in range(20):
    img = list(range(1, 8))
    rnd.shuffle(img)
    forms.add(canonical_form(7, apply(Permutation(img), F.blocks)))
print(len(forms), "distinct form:", forms.pop())
print("automorphisms:", blocklist_stabilizer(7, F.blocks).order())
