"""Rank-3 simple matroids encoded as 2-partitions of ``{1..n}``.

A block (line) is a set of at least two atoms; every pair of atoms lies in
exactly one block.  Size-2 blocks are stored explicitly.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field
from itertools import combinations
from math import comb, isqrt
from typing import Iterable, Mapping

from .permgroup import canonical_form, normalize_blocks

__all__ = [
    "MatroidError",
    "PairCoveredTwice",
    "PairUncovered",
    "ImproperBlock",
    "NotIntegrallySplitting",
    "TwoPartition",
    "Rank2Marker",
    "MultiplicityVector",
    "CharacteristicData",
    "BivariatePolynomial",
    "ContractionSummary",
    "make_matroid",
    "multiplicity_vector",
    "characteristic_data",
    "rank",
    "tutte",
    "char_poly_via_tutte",
    "deletion",
    "contraction_summary",
    "is_supersolvable",
    "modular_block",
    "is_divisionally_free",
    "is_inductively_free",
    "IFCache",
    "balancedness",
    "deficiency",
    "deficiencies",
    "boolean_m3",
    "braid_a3",
    "fano",
    "near_pencil",
    "example_m1",
    "example_m2",
    "example_dfnif",
]


class MatroidError(ValueError):
    pass


class PairCoveredTwice(MatroidError):
    pass


class PairUncovered(MatroidError):
    pass


class ImproperBlock(MatroidError):
    pass


class NotIntegrallySplitting(MatroidError):
    pass


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class TwoPartition:
    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))

    @property
    def masks(self) -> tuple[int, ...]:
        m = self.__dict__.get("_masks")
        if m is None:
            m = tuple(sum(1 << (a - 1) for a in b) for b in self.blocks)
            object.__setattr__(self, "_masks", m)
        return m

    @property
    def degrees(self) -> tuple[int, ...]:
        """Number of blocks through each atom (index 0 is atom 1)."""
        d = [0] * self.n
        for b in self.blocks:
            for a in b:
                d[a - 1] += 1
        return tuple(d)

    def pair_table(self) -> dict[tuple[int, int], int]:
        out = {}
        for i, b in enumerate(self.blocks):
            for x, y in combinations(b, 2):
                out[x, y] = i
        return out

    def __len__(self):
        return len(self.blocks)

    def __repr__(self):
        body = ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)
        return f"TwoPartition(n={self.n}, [{body}])"


@dataclass(frozen=True)
class Rank2Marker:
    """Stands in for a deletion in which all atoms became collinear."""

    n: int


@dataclass(frozen=True)
class MultiplicityVector:
    n: int
    m: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(k): int(v) for k, v in dict(self.m).items() if v}
        for k, v in clean.items():
            if not 2 <= k <= self.n - 1 or v < 0:
                raise MatroidError(f"bad multiplicity m_{k}={v} for n={self.n}")
        object.__setattr__(self, "m", dict(sorted(clean.items())))

    def __hash__(self):
        return hash((self.n, tuple(self.m.items())))

    def __getitem__(self, k: int) -> int:
        return self.m.get(k, 0)

    @classmethod
    def from_list(cls, n: int, values: Iterable[int]) -> "MultiplicityVector":
        """From ``(m_2, m_3, ...)``."""
        return cls(n, {k: v for k, v in enumerate(values, start=2)})

    def as_list(self) -> list[int]:
        """``[m_2, ..., m_kmax]`` with trailing zeros trimmed."""
        if not self.m:
            return []
        top = max(self.m)
        return [self[k] for k in range(2, top + 1)]

    def is_valid(self) -> bool:
        return sum(v * comb(k, 2) for k, v in self.m.items()) == comb(self.n, 2)

    @property
    def total(self) -> int:
        return sum(self.m.values())

    @property
    def b2(self) -> int:
        return sum(v * (k - 1) for k, v in self.m.items())

    def sizes_desc(self) -> list[int]:
        return sorted((k for k, v in self.m.items() if v), reverse=True)

    def __repr__(self):
        return f"MultiplicityVector(n={self.n}, {self.m})"


@dataclass(frozen=True)
class CharacteristicData:
    n: int
    b2: int
    quadratic: tuple[int, int, int]
    split: tuple[int, int] | None

    def q(self, t: int) -> int:
        a, b, c = self.quadratic
        return a * t * t + b * t + c

    def cubic(self) -> tuple[int, int, int, int]:
        """Coefficients of ``(t-1) q(t)``, highest degree first."""
        a, b, c = self.quadratic
        return (a, b - a, c - b, -c)


@dataclass(frozen=True)
class BivariatePolynomial:
    coeffs: Mapping[tuple[int, int], int]

    def __post_init__(self):
        object.__setattr__(self, "coeffs",
                           {k: v for k, v in sorted(dict(self.coeffs).items()) if v})

    def __eq__(self, other):
        return isinstance(other, BivariatePolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def __call__(self, x, y):
        return sum(c * x**i * y**j for (i, j), c in self.coeffs.items())

    def as_list(self) -> list[list[int]]:
        return [[i, j, c] for (i, j), c in self.coeffs.items()]

    @classmethod
    def from_list(cls, rows) -> "BivariatePolynomial":
        return cls({(int(i), int(j)): int(c) for i, j, c in rows})

    _TERM = re.compile(r"([+-]?)\s*(\d*)\s*((?:[xy](?:\^\d+)?)*)")

    @classmethod
    def parse(cls, text: str) -> "BivariatePolynomial":
        """Parse ``"y^8+3y^7+x^3+5xy^2+16x"`` style strings."""
        s = text.replace(" ", "").replace("*", "")
        if not s:
            return cls({})
        out: dict[tuple[int, int], int] = {}
        pos = 0
        while pos < len(s):
            m = cls._TERM.match(s, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse polynomial at {s[pos:]!r}")
            sign, num, mono = m.groups()
            c = int(num) if num else 1
            if sign == "-":
                c = -c
            i = j = 0
            for var, exp in re.findall(r"([xy])(?:\^(\d+))?", mono):
                e = int(exp) if exp else 1
                if var == "x":
                    i += e
                else:
                    j += e
            if not num and not mono:
                raise ValueError(f"empty term in {text!r}")
            out[i, j] = out.get((i, j), 0) + c
            pos = m.end()
        return cls(out)

    def __str__(self):
        terms = []
        for (i, j), c in sorted(self.coeffs.items(), key=lambda t: (-(t[0][0] + t[0][1]), -t[0][0])):
            mono = ("x" + (f"^{i}" if i > 1 else "") if i else "") + \
                   ("y" + (f"^{j}" if j > 1 else "") if j else "")
            coef = "" if c == 1 and mono else str(c)
            terms.append(coef + mono)
        return " + ".join(terms) or "0"


@dataclass(frozen=True)
class ContractionSummary:
    atom: int
    d_H: int

    def char_poly(self) -> tuple[int, int, int]:
        """``(t-1)(t-(d_H-1))`` as coefficients."""
        r = self.d_H - 1
        return (1, -1 - r, r)


# ---------------------------------------------------------------------------
# construction


def _validated(n: int, blocks) -> TwoPartition:
    if n < 3:
        raise ImproperBlock(f"need n >= 3, got {n}")
    blocks = normalize_blocks(blocks)
    for b in blocks:
        if b and (b[0] < 1 or b[-1] > n):
            raise MatroidError(f"atom outside 1..{n} in {b}")
        if len(b) < 2 or len(b) >= n:
            raise ImproperBlock(f"block {b} is not proper for n={n}")
    seen: dict[tuple[int, int], tuple[int, ...]] = {}
    for b in blocks:
        for p in combinations(b, 2):
            if p in seen:
                raise PairCoveredTwice(f"pair {p} lies in {seen[p]} and {b}")
            seen[p] = b
    if len(seen) != comb(n, 2):
        missing = next(p for p in combinations(range(1, n + 1), 2) if p not in seen)
        raise PairUncovered(f"pair {missing} is not covered")
    return TwoPartition(n, blocks)


def make_matroid(n: int, raw_blocks: Iterable[Iterable[int]]) -> TwoPartition:
    """Validate and normalize a block list."""
    return _validated(n, raw_blocks)


def multiplicity_vector(M: TwoPartition) -> MultiplicityVector:
    m: dict[int, int] = {}
    for b in M.blocks:
        m[len(b)] = m.get(len(b), 0) + 1
    return MultiplicityVector(M.n, m)


def characteristic_data(mv: MultiplicityVector) -> CharacteristicData:
    n = mv.n
    b2 = mv.b2
    c = b2 - (n - 1)
    disc = (n - 1) ** 2 - 4 * c
    split = None
    if disc >= 0:
        r = isqrt(disc)
        if r * r == disc and (n - 1 + r) % 2 == 0:
            split = ((n - 1 - r) // 2, (n - 1 + r) // 2)
    return CharacteristicData(n, b2, (1, -(n - 1), c), split)


def rank(M: TwoPartition, S: Iterable[int]) -> int:
    S = set(S)
    if len(S) <= 1:
        return len(S)
    for b in M.blocks:
        if S.issubset(b):
            return 2
    return 3


# ---------------------------------------------------------------------------
# polynomials


def _rank_size_census(M: TwoPartition) -> dict[tuple[int, int], int]:
    """Number of subsets S with (r(S), |S|) for every pair."""
    n = M.n
    pair_block = {}
    for m in M.masks:
        atoms = [a for a in range(n) if m >> a & 1]
        for x, y in combinations(atoms, 2):
            pair_block[x, y] = m
    census: dict[tuple[int, int], int] = {}
    for S in range(1 << n):
        s = S.bit_count()
        if s <= 1:
            r = s
        else:
            low = S & -S
            x = low.bit_length() - 1
            rest = S ^ low
            y = (rest & -rest).bit_length() - 1
            r = 2 if S & ~pair_block[x, y] == 0 else 3
        census[r, s] = census.get((r, s), 0) + 1
    return census


def tutte(M: TwoPartition) -> BivariatePolynomial:
    """Tutte polynomial by the subset expansion."""
    out: dict[tuple[int, int], int] = {}
    for (r, s), cnt in _rank_size_census(M).items():
        p, q = 3 - r, s - r
        # (x-1)^p (y-1)^q
        for i in range(p + 1):
            ci = comb(p, i) * (-1) ** (p - i)
            for j in range(q + 1):
                c = cnt * ci * comb(q, j) * (-1) ** (q - j)
                out[i, j] = out.get((i, j), 0) + c
    return BivariatePolynomial(out)


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def char_poly_via_tutte(M: TwoPartition) -> tuple[int, int, int, int]:
    """``(-1)^3 T(1-t, 0)`` as coefficients, highest degree first."""
    T = tutte(M)
    acc = [0]  # ascending powers of t
    for (i, j), c in T.coeffs.items():
        if j:
            continue
        term = [c]
        for _ in range(i):
            term = _poly_mul(term, [1, -1])
        if len(term) > len(acc):
            acc += [0] * (len(term) - len(acc))
        for k, v in enumerate(term):
            acc[k] += v
    acc = [-v for v in acc] + [0] * (4 - len(acc))
    return tuple(reversed(acc[:4]))


# ---------------------------------------------------------------------------
# deletion / contraction


def deletion(M: TwoPartition, H: int) -> TwoPartition | Rank2Marker:
    n = M.n
    if n < 4:
        raise MatroidError("deletion needs n >= 4")
    if not 1 <= H <= n:
        raise MatroidError(f"atom {H} outside 1..{n}")
    new = []
    for b in M.blocks:
        nb = tuple(a - (a > H) for a in b if a != H)
        if len(nb) >= 2:
            new.append(nb)
    if len(new) == 1 and len(new[0]) == n - 1:
        return Rank2Marker(n - 1)
    return TwoPartition(n - 1, normalize_blocks(new))


def contraction_summary(M: TwoPartition, H: int) -> ContractionSummary:
    if not 1 <= H <= M.n:
        raise MatroidError(f"atom {H} outside 1..{M.n}")
    return ContractionSummary(H, sum(1 for b in M.blocks if H in b))


# ---------------------------------------------------------------------------
# freeness classes


def modular_block(M: TwoPartition) -> tuple[int, ...] | None:
    """First block meeting every other block, or None."""
    deg = M.degrees
    total = len(M.blocks)
    for b in M.blocks:
        # distinct blocks share at most one atom
        if sum(deg[a - 1] - 1 for a in b) == total - 1:
            return b
    return None


def is_supersolvable(M: TwoPartition) -> bool:
    F0 = modular_block(M)
    if F0 is None:
        return False
    roots = characteristic_data(multiplicity_vector(M)).split
    expected = tuple(sorted((len(F0) - 1, M.n - len(F0))))
    if roots != expected:
        raise AssertionError(f"modular block {F0} but roots {roots}")
    return True


def is_divisionally_free(M: TwoPartition) -> bool:
    if M.n == 3:
        return True
    cd = characteristic_data(multiplicity_vector(M))
    return any(cd.q(d - 1) == 0 for d in set(M.degrees))


class IFCache:
    """Thread-safe memo: canonical block list -> inductive freeness."""

    def __init__(self):
        self._d: dict = {}
        self._lock = threading.Lock()

    def get(self, key):
        return self._d.get(key)

    def put(self, key, value: bool):
        with self._lock:
            self._d[key] = value

    def __len__(self):
        return len(self._d)


def is_inductively_free(M: TwoPartition, cache: IFCache | dict | None = None,
                        strict: bool = False) -> bool:
    """Recursive test; a collinear deletion counts as free unless ``strict``."""
    if cache is None:
        cache = IFCache()
    return _if_rec(M, cache, strict)


def _cache_get(cache, key):
    return cache.get(key)


def _cache_put(cache, key, value):
    if isinstance(cache, dict):
        cache[key] = value
    else:
        cache.put(key, value)


def _if_rec(M, cache, strict):
    if M.n == 3:
        return True
    key = (M.n, canonical_form(M.n, M.blocks), strict)
    hit = _cache_get(cache, key)
    if hit is not None:
        return hit
    cd = characteristic_data(multiplicity_vector(M))
    result = False
    if cd.split is not None:
        deg = M.degrees
        for H in range(1, M.n + 1):
            if cd.q(deg[H - 1] - 1) != 0:
                continue
            D = deletion(M, H)
            if isinstance(D, Rank2Marker):
                if not strict:
                    result = True
                    break
                continue
            if _if_rec(D, cache, strict):
                result = True
                break
    _cache_put(cache, key, result)
    return result


def balancedness(M: TwoPartition) -> tuple[bool, bool, bool]:
    """(atom balanced, coatom balanced, strongly balanced)."""
    split = characteristic_data(multiplicity_vector(M)).split
    if split is None:
        raise NotIntegrallySplitting(f"{M!r} has no integral root pair")
    a = split[0]
    atom = max(M.degrees) <= a
    coatom = max(len(b) for b in M.blocks) < a
    return atom, coatom, atom and coatom


def deficiencies(A: Iterable[Iterable[int]], n: int) -> list[int]:
    """Deficiency of every atom (index 0 is atom 1)."""
    nb = [0] * (n + 1)
    for b in A:
        b = list(b)
        for a in b:
            nb[a] |= sum(1 << x for x in b if x != a)
    return [(n - 1) - nb[e].bit_count() for e in range(1, n + 1)]


def deficiency(A: Iterable[Iterable[int]], e: int, n: int) -> int:
    """``(n-1)`` minus the number of atoms sharing a block with ``e``."""
    return deficiencies(A, n)[e - 1]


# ---------------------------------------------------------------------------
# named matroids


def boolean_m3() -> TwoPartition:
    return make_matroid(3, [(1, 2), (1, 3), (2, 3)])


def braid_a3() -> TwoPartition:
    return make_matroid(6, [(1, 2, 4), (1, 3, 5), (2, 3, 6), (4, 5, 6), (3, 4), (2, 5), (1, 6)])


def fano() -> TwoPartition:
    return make_matroid(7, [(1, 2, 4), (2, 3, 5), (3, 4, 6), (4, 5, 7), (1, 5, 6), (2, 6, 7), (1, 3, 7)])


def near_pencil(n: int) -> TwoPartition:
    """One block ``{1..n-1}`` plus the pairs through atom ``n``."""
    return make_matroid(n, [tuple(range(1, n))] + [(a, n) for a in range(1, n)])


def example_m1() -> TwoPartition:
    return make_matroid(11, [
        (1, 2, 3, 4), (1, 5, 6, 7), (1, 8, 9, 10), (2, 5, 8, 11), (3, 6, 9, 11),
        (2, 6, 10), (2, 7, 9), (3, 5, 10), (4, 5, 9), (4, 7, 11),
        (1, 11), (3, 7), (3, 8), (4, 6), (4, 8), (4, 10), (6, 8), (7, 8), (7, 10), (10, 11),
    ])


def example_m2() -> TwoPartition:
    return make_matroid(11, [
        (1, 2, 3, 4), (1, 5, 6, 7), (2, 5, 8, 9), (3, 6, 8, 10), (4, 7, 9, 10),
        (1, 8, 11), (2, 7, 11), (3, 9, 11), (4, 6, 11), (5, 10, 11),
        (1, 9), (1, 10), (2, 6), (2, 10), (3, 5), (3, 7), (4, 5), (4, 8), (6, 9), (7, 8),
    ])


def example_dfnif() -> TwoPartition:
    """Divisionally free, not inductively free, n=14; lines of the GF(13) matrix."""
    return make_matroid(14, [
        (1, 2, 3, 4, 5), (1, 6, 7, 8, 9), (1, 10, 11, 12), (2, 6, 10, 13), (2, 7, 11, 14),
        (3, 6, 12, 14), (3, 8, 11, 13), (4, 9, 10, 14), (4, 7, 13), (5, 7, 12), (5, 8, 10),
        (5, 9, 11), (5, 13, 14), (9, 12, 13), (1, 13), (1, 14), (2, 8), (2, 9), (2, 12),
        (3, 7), (3, 9), (3, 10), (4, 6), (4, 8), (4, 11), (4, 12), (5, 6), (6, 11), (7, 10),
        (8, 12), (8, 14),
    ])
