"""Permutation groups acting on block lists.

Atoms are 1-based in the public API.  Internally permutations are tuples of
0-based images and blocks are bitmasks (bit ``a`` for 0-based atom ``a``).

Block lists are compared in normal form: blocks sorted by decreasing size,
lexicographically within a size.  The central routine finds the smallest
image of a block list under ``Sym(n)``; run in test mode on a minimal list it
also returns generators of the list's full automorphism group.
"""

from __future__ import annotations

from math import factorial
from typing import Iterable, Iterator, Sequence

__all__ = [
    "MalformedPermutation",
    "Permutation",
    "PermGroup",
    "group_from_generators",
    "symmetric_group",
    "apply",
    "normalize_blocks",
    "blocklist_stabilizer",
    "minimal_image",
    "is_minimal_in_orbit",
    "canonical_form",
]


class MalformedPermutation(ValueError):
    pass


# ---------------------------------------------------------------------------
# raw 0-based permutation helpers


def _mul(g, h):
    """(g*h)(x) = g(h(x))."""
    return tuple(g[x] for x in h)


def _inv(g):
    out = [0] * len(g)
    for i, x in enumerate(g):
        out[x] = i
    return tuple(out)


def _identity(n):
    return tuple(range(n))


def _check(images, n):
    if len(images) != n or sorted(images) != list(range(n)):
        raise MalformedPermutation(f"not a permutation of degree {n}: {images!r}")


class Permutation:
    """A bijection of ``{1..n}`` stored as its image array."""

    __slots__ = ("_img",)

    def __init__(self, images: Sequence[int]):
        img = tuple(int(x) - 1 for x in images)
        _check(img, len(img))
        self._img = img

    @classmethod
    def _raw(cls, img):
        p = cls.__new__(cls)
        p._img = tuple(img)
        return p

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls._raw(range(n))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> "Permutation":
        img = list(range(n))
        seen = set()
        for cyc in cycles:
            cyc = [int(c) - 1 for c in cyc]
            for c in cyc:
                if not 0 <= c < n or c in seen:
                    raise MalformedPermutation(f"bad cycle {cycles!r} for degree {n}")
                seen.add(c)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a] = b
        return cls._raw(img)

    @property
    def degree(self) -> int:
        return len(self._img)

    @property
    def images(self) -> tuple[int, ...]:
        return tuple(x + 1 for x in self._img)

    def __call__(self, x: int) -> int:
        return self._img[x - 1] + 1

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.degree != other.degree:
            raise MalformedPermutation("degree mismatch")
        return Permutation._raw(_mul(self._img, other._img))

    def inverse(self) -> "Permutation":
        return Permutation._raw(_inv(self._img))

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self._img))

    def __eq__(self, other):
        return isinstance(other, Permutation) and self._img == other._img

    def __hash__(self):
        return hash(self._img)

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for i in range(len(self._img)):
            if i in seen or self._img[i] == i:
                continue
            cyc, j = [], i
            while j not in seen:
                seen.add(j)
                cyc.append(j + 1)
                j = self._img[j]
            out.append(tuple(cyc))
        return out

    def __repr__(self):
        cyc = self.cycles()
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) or "()"


def _as_raw(p, n):
    if isinstance(p, Permutation):
        img = p._img
    else:
        img = tuple(int(x) - 1 for x in p)
    _check(img, n)
    return img


# ---------------------------------------------------------------------------
# Schreier-Sims


class PermGroup:
    """Permutation group of degree ``n`` with a deterministic stabilizer chain.

    ``base`` may prescribe the order of base points; points not listed are
    appended in increasing order whenever the chain needs them.
    """

    def __init__(self, n: int, gens: Iterable = (), base: Sequence[int] | None = None,
                 _raw: bool = False, _full_base: Sequence[int] | None = None):
        self.n = n
        ident = _identity(n)
        raw = []
        for g in gens:
            g = tuple(g) if _raw else _as_raw(g, n)
            if _raw:
                _check(g, n)
            if g != ident and g not in raw:
                raw.append(g)
        self._gens = raw
        self._base: list[int] = list(_full_base) if _full_base is not None else []
        self._sgens: list[list[tuple]] = []
        self._trans: list[dict[int, tuple]] = []
        if base is None:
            self._prescribed = []
        else:
            self._prescribed = list(base) if _raw else [b - 1 for b in base]
        self._schreier_sims()

    # chain construction --------------------------------------------------

    def _next_base_point(self, g):
        for b in self._prescribed:
            if b not in self._base and g[b] != b:
                return b
        for b in range(self.n):
            if b not in self._base and g[b] != b:
                return b
        raise AssertionError("identity has no moved point")

    @staticmethod
    def _orbit(point, gens, n):
        trans = {point: _identity(n)}
        todo = [point]
        while todo:
            x = todo.pop()
            u = trans[x]
            for g in gens:
                y = g[x]
                if y not in trans:
                    trans[y] = _mul(g, u)
                    todo.append(y)
        return trans

    def _strip(self, g, start=0):
        for i in range(start, len(self._base)):
            b = g[self._base[i]]
            u = self._trans[i].get(b)
            if u is None:
                return g, i
            g = _mul(_inv(u), g)
        return g, len(self._base)

    def _schreier_sims(self):
        n = self.n
        ident = _identity(n)
        for g in self._gens:
            if all(g[b] == b for b in self._base):
                self._base.append(self._next_base_point(g))
        self._sgens = [[g for g in self._gens if all(g[b] == b for b in self._base[:i])]
                       for i in range(len(self._base))]
        self._trans = [self._orbit(self._base[i], self._sgens[i], n)
                       for i in range(len(self._base))]
        i = len(self._base) - 1
        while i >= 0:
            restart = False
            trans = self._trans[i]
            for beta, u in list(trans.items()):
                for s in self._sgens[i]:
                    us = _mul(s, u)
                    w = trans[us[self._base[i]]]
                    sch = _mul(_inv(w), us)
                    if sch == ident:
                        continue
                    h, j = self._strip(sch, i + 1)
                    if h == ident:
                        continue
                    if j == len(self._base):
                        self._base.append(self._next_base_point(h))
                        self._sgens.append([])
                        self._trans.append({self._base[-1]: ident})
                    for k in range(i + 1, j + 1):
                        self._sgens[k].append(h)
                        self._trans[k] = self._orbit(self._base[k], self._sgens[k], n)
                    i = j
                    restart = True
                    break
                if restart:
                    break
            if not restart:
                i -= 1

    # queries -------------------------------------------------------------

    @property
    def degree(self) -> int:
        return self.n

    @property
    def generators(self) -> list[Permutation]:
        return [Permutation._raw(g) for g in self._gens]

    @property
    def base(self) -> list[int]:
        return [b + 1 for b in self._base]

    @property
    def basic_orbits(self) -> list[list[int]]:
        return [sorted(x + 1 for x in t) for t in self._trans]

    def order(self) -> int:
        out = 1
        for t in self._trans:
            out *= len(t)
        return out

    def is_trivial(self) -> bool:
        return not self._gens

    def is_symmetric(self) -> bool:
        return self.order() == factorial(self.n)

    def _contains_raw(self, g) -> bool:
        h, j = self._strip(tuple(g))
        return j == len(self._base) and h == _identity(self.n)

    def __contains__(self, p) -> bool:
        return self._contains_raw(_as_raw(p, self.n))

    def _elements_raw(self) -> Iterator[tuple]:
        def rec(i, acc):
            if i == len(self._trans):
                yield acc
                return
            for u in self._trans[i].values():
                yield from rec(i + 1, _mul(acc, u))
        yield from rec(0, _identity(self.n))

    def elements(self) -> Iterator[Permutation]:
        for g in self._elements_raw():
            yield Permutation._raw(g)

    def stabilizer(self, point: int) -> "PermGroup":
        """Point stabilizer of ``point`` (1-based)."""
        p = point - 1
        order = [p] + [x for x in range(self.n) if x != p]
        g = PermGroup(self.n, self._gens, _raw=True, _full_base=order)
        return PermGroup(self.n, g._sgens[1] if self.n > 1 else [], _raw=True)

    def with_full_base(self, base: Sequence[int]) -> "PermGroup":
        """Same group, chain rebuilt on the given complete (0-based) base."""
        return PermGroup(self.n, self._gens, _raw=True, _full_base=base)

    def __repr__(self):
        return f"PermGroup(degree={self.n}, order={self.order()})"


def group_from_generators(n: int, gens: Iterable = ()) -> PermGroup:
    """Build a group from 1-based image arrays or :class:`Permutation` objects."""
    return PermGroup(n, gens)


def symmetric_group(n: int) -> PermGroup:
    gens = []
    if n >= 2:
        gens.append((1, 0) + tuple(range(2, n)))
    if n >= 3:
        gens.append(tuple(range(1, n)) + (0,))
    return PermGroup(n, gens, _raw=True)


# ---------------------------------------------------------------------------
# block lists


def _sort_key(block):
    return (-len(block), block)


def normalize_blocks(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    """Sort blocks: size-descending groups, lexicographic within each group."""
    out = {tuple(sorted(b)) for b in blocks}
    return tuple(sorted(out, key=_sort_key))


def apply(p, blocks, n: int | None = None) -> tuple[tuple[int, ...], ...]:
    """Image of a block list under ``p`` (1-based), renormalized."""
    if isinstance(p, Permutation):
        img = p._img
    else:
        img = tuple(int(x) - 1 for x in p)
    return normalize_blocks([img[a - 1] + 1 for a in b] for b in blocks)


def _to_masks(blocks):
    return [sum(1 << (a - 1) for a in b) for b in blocks]


def _atoms(mask):
    out = []
    a = 0
    while mask:
        if mask & 1:
            out.append(a)
        mask >>= 1
        a += 1
    return out


def _masks_to_blocks(masks):
    return normalize_blocks([tuple(a + 1 for a in _atoms(m)) for m in masks])


def _image_masks(perm, masks):
    out = []
    for m in masks:
        r = 0
        for a in _atoms(m):
            r |= 1 << perm[a]
        out.append(r)
    return out


# ---------------------------------------------------------------------------
# minimal images under Sym(n): block-by-block search over ordered cells
#
# A node fixes the first j blocks of the image.  Atoms are grouped into cells,
# each owning a contiguous range of labels; every placed block is a union of
# cells, so its image is known exactly.  The next image block is the smallest
# "best image" over the remaining blocks of the current size, where a block
# takes the lowest labels of every cell it meets and fresh labels for atoms
# not yet in a cell.  Ties branch; choosing a block splits the cells it meets.


_INF = 1 << 20


class NotMinimal(Exception):
    pass


def _sorted_masks(masks):
    return sorted(masks, key=lambda m: (-m.bit_count(), _atoms(m)))


def _twin_gens(n, masks):
    """Transpositions of atoms lying in exactly the same blocks."""
    inc = [0] * n
    for i, m in enumerate(masks):
        for a in _atoms(m):
            inc[a] |= 1 << i
    classes: dict[int, list[int]] = {}
    for a in range(n):
        classes.setdefault(inc[a], []).append(a)
    gens = []
    for cls in classes.values():
        for x, y in zip(cls, cls[1:]):
            g = list(range(n))
            g[x], g[y] = y, x
            gens.append(tuple(g))
    return gens


class _CellSearch:
    def __init__(self, n, masks):
        # masks must already be in normal-form order
        self.n = n
        self.masks = masks
        self.nb = len(masks)
        self.index = {m: i for i, m in enumerate(masks)}
        sizes = [m.bit_count() for m in masks]
        self.sizes = sizes
        self.group_range = []
        lo = 0
        for j in range(self.nb):
            if j and sizes[j] != sizes[j - 1]:
                lo = j
            self.group_range.append(lo)
        self.group_hi = [0] * self.nb
        hi = self.nb
        for j in range(self.nb - 1, -1, -1):
            if j < self.nb - 1 and sizes[j] != sizes[j + 1]:
                hi = j + 1
            self.group_hi[j] = hi
        self.gens = []
        self.gen_moved = []
        for g in _twin_gens(n, masks):
            self._add_aut(g)
        self.best = [None] * self.nb
        self.best_lab = None
        self.best_path = None
        self.path = []
        self.test = False

    def _add_aut(self, g):
        if g in self.gens:
            return
        moved = 0
        for i, m in enumerate(self.masks):
            r = 0
            for a in _atoms(m):
                r |= 1 << g[a]
            if r != m:
                moved |= 1 << i
        self.gens.append(g)
        self.gen_moved.append((moved, [self.index[_image_mask(g, m)] for m in self.masks]
                               if moved else None))

    @staticmethod
    def _image(b, cells, U, ell):
        out = []
        for cm, st in cells:
            k = (b & cm).bit_count()
            if k:
                out.extend(range(st, st + k))
        u = (b & U).bit_count()
        if u:
            out.extend(range(ell, ell + u))
        return tuple(out)

    def _labelling(self, cells, U, ell):
        lab = [0] * self.n
        for cm, st in cells:
            for a in _atoms(cm):
                lab[a] = st
                st += 1
        for a in _atoms(U):
            lab[a] = ell
            ell += 1
        return lab

    def _orbit_find(self, placed):
        parent = {}

        def find(x):
            while x in parent:
                x = parent[x]
            return x

        for moved, bperm in self.gen_moved:
            if bperm is None or moved & placed:
                continue
            for i, y in enumerate(bperm):
                if y != i:
                    rx, ry = find(i), find(y)
                    if rx != ry:
                        parent[ry] = rx
        return find

    def _reset(self, j):
        for k in range(j, self.nb):
            self.best[k] = None
        self.best_lab = None
        self.best_path = None

    def _leaf(self, j, rem, cells, U, ell):
        lab = self._labelling(cells, U, ell)
        tail = []
        for b in _atoms(rem):
            tail.append(tuple(sorted(lab[a] for a in _atoms(self.masks[b]))))
        tail.sort(key=lambda t: (-len(t), t))
        best = self.best
        for k, im in enumerate(tail):
            ref = best[j + k]
            if ref is None:
                best[j + k:] = tail[k:]
                break
            if im < ref:
                if self.test:
                    raise NotMinimal
                self._reset(j + k)
                best[j + k:] = tail[k:]
                break
            if im > ref:
                return j
        if self.best_lab is None:
            self.best_lab = lab
            self.best_path = list(self.path)
            return j
        inv = [0] * self.n
        for a, l in enumerate(lab):
            inv[l] = a
        g = tuple(inv[l] for l in self.best_lab)
        if any(i != x for i, x in enumerate(g)):
            self._add_aut(g)
        bp, cp = self.best_path, self.path
        d = 0
        while d < len(bp) and d < len(cp) and bp[d] == cp[d]:
            d += 1
        return d

    def _explore(self, j, cells, U, ell, rem):
        if rem == 0 or (U == 0 and len(cells) == self.n):
            return self._leaf(j, rem, cells, U, ell)
        masks = self.masks
        m = None
        children = []
        for b in range(self.group_range[j], self.group_hi[j]):
            if rem >> b & 1:
                im = self._image(masks[b], cells, U, ell)
                if m is None or im < m:
                    m = im
                    children = [b]
                elif im == m:
                    children.append(b)
        ref = self.best[j]
        if ref is not None:
            if m > ref:
                return j
            if m < ref:
                if self.test:
                    raise NotMinimal
                self._reset(j)
                self.best[j] = m
        else:
            self.best[j] = m
        placed = ((1 << self.nb) - 1) & ~rem
        explored = []
        find = None
        ngens = -1
        for b in children:
            if explored:
                if ngens != len(self.gens):
                    find = self._orbit_find(placed)
                    ngens = len(self.gens)
                rb = find(b)
                if any(find(e) == rb for e in explored):
                    continue
            bm = masks[b]
            ncells = []
            for cm, st in cells:
                inter = cm & bm
                if inter and inter != cm:
                    ncells.append((inter, st))
                    ncells.append((cm ^ inter, st + inter.bit_count()))
                else:
                    ncells.append((cm, st))
            fresh = bm & U
            nell = ell
            if fresh:
                ncells.append((fresh, ell))
                nell = ell + fresh.bit_count()
            self.path.append(b)
            r = self._explore(j + 1, ncells, U & ~bm, nell, rem & ~(1 << b))
            self.path.pop()
            explored.append(b)
            if r < j:
                return r
        return j

    def run(self, test):
        self.test = test
        if test:
            self.best = [tuple(_atoms(m)) for m in self.masks]
        self._explore(0, [], (1 << self.n) - 1, 0, (1 << self.nb) - 1)
        return self.best, self.best_lab


def _image_mask(g, m):
    r = 0
    while m:
        low = m & -m
        r |= 1 << g[low.bit_length() - 1]
        m ^= low
    return r


def _sym_is_min(n, masks):
    """(is lex-minimal, automorphism generators) for masks in normal-form order.

    When minimal, the generators found generate the full automorphism group.
    """
    s = _CellSearch(n, masks)
    try:
        s.run(test=True)
    except NotMinimal:
        return False, None
    return True, s.gens


def _sym_canonical(n, masks):
    """(minimal image as 0-based tuples, labelling atom -> label)."""
    s = _CellSearch(n, _sorted_masks(masks))
    best, lab = s.run(test=False)
    return best, lab


def _sym_automorphisms(n, masks):
    masks = _sorted_masks(masks)
    ok, gens = _sym_is_min(n, masks)
    if ok:
        return gens
    best, lab = _sym_canonical(n, masks)
    cmasks = [sum(1 << a for a in t) for t in best]
    ok, gens = _sym_is_min(n, cmasks)
    assert ok
    inv = _inv(lab)
    return [_mul(inv, _mul(g, lab)) for g in gens]


# ---------------------------------------------------------------------------
# minimal images under an arbitrary group, via a stabilizer chain with base
# 0..n-1; a node is pruned when the fully determined prefix of its image
# already loses to the reference list


def _determined_prefix(lab, blocks):
    keys = []
    for blk in blocks:
        known = sorted(lab[a] for a in blk if lab[a] >= 0)
        keys.append((-len(blk), tuple(known) + (_INF,) * (len(blk) - len(known)), len(known) == len(blk)))
    keys.sort()
    out = []
    for _, k, full in keys:
        if not full:
            break
        out.append(k)
    return out



def _group_search(G, masks, test):
    n = G.n
    blocks = [_atoms(m) for m in _sorted_masks(masks)]
    best = [tuple(b) for b in blocks] if test else None
    lab = [-1] * n
    chain = G._trans

    def rec(i, u):
        nonlocal best
        if i == n:
            img = sorted((tuple(sorted(lab[a] for a in b)) for b in blocks),
                         key=lambda t: (-len(t), t))
            if best is None or img < best:
                if test and img < best:
                    raise NotMinimal
                best = img
            return
        if best is not None:
            d = _determined_prefix(lab, blocks)
            ref = best[: len(d)]
            if d > ref:
                return
            if test and d < ref:
                raise NotMinimal
        for delta, t in chain[i].items():
            x = u[delta]
            lab[x] = i
            rec(i + 1, _mul(u, t))
            lab[x] = -1

    rec(0, _identity(n))
    return best


def _group_for_search(G: PermGroup) -> PermGroup:
    if G._base == list(range(G.n)):
        return G
    return G.with_full_base(range(G.n))


# ---------------------------------------------------------------------------
# public entry points


def _blocks_in(n, blocks):
    blocks = normalize_blocks(blocks)
    for b in blocks:
        for a in b:
            if not 1 <= a <= n:
                raise ValueError(f"atom {a} outside 1..{n}")
    return blocks


def _from_zero(tuples):
    return tuple(tuple(a + 1 for a in t) for t in tuples)


def blocklist_stabilizer(n: int, blocks) -> PermGroup:
    """Setwise stabilizer ``{g in Sym(n) : g(A) = A}`` of a block list."""
    blocks = _blocks_in(n, blocks)
    return PermGroup(n, _sym_automorphisms(n, _to_masks(blocks)), _raw=True)


def minimal_image(G: PermGroup, blocks) -> tuple[tuple[int, ...], ...]:
    """Lexicographically minimal element of the ``G``-orbit of a block list."""
    n = G.n
    blocks = _blocks_in(n, blocks)
    if G.is_trivial():
        return blocks
    masks = _to_masks(blocks)
    if G.is_symmetric():
        return _from_zero(_sym_canonical(n, masks)[0])
    return _from_zero(_group_search(_group_for_search(G), masks, test=False))


def is_minimal_in_orbit(G: PermGroup, blocks) -> bool:
    """True iff ``blocks`` equals its minimal image under ``G`` (early exit)."""
    n = G.n
    blocks = _blocks_in(n, blocks)
    if G.is_trivial():
        return True
    masks = _to_masks(blocks)
    if G.is_symmetric():
        return _sym_is_min(n, masks)[0]
    try:
        _group_search(_group_for_search(G), masks, test=True)
    except NotMinimal:
        return False
    return True


def canonical_form(n: int, blocks) -> tuple[tuple[int, ...], ...]:
    """Minimal image under the full symmetric group."""
    blocks = _blocks_in(n, blocks)
    return _from_zero(_sym_canonical(n, _to_masks(blocks))[0])
