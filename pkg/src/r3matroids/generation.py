"""Isomorph-free generation of rank-3 simple matroids by block size levels.

Blocks are placed one size class at a time, largest first.  A tree node holds
an admissible partial 2-partition ``A`` whose blocks are exactly the classes
larger than the current level; its children add all ``m_k`` blocks of the
current size ``k`` at once.  Isomorph rejection is orderly: a group of new
blocks is kept only if ``A`` plus the group is the lexicographically smallest
block list in its ``Sym(n)`` orbit.  Because smallest block lists are closed
under taking prefixes, the test runs after every block and prunes early.

How a node tests minimality depends on ``Stab(A)``:

* trivial group: nothing to test;
* small group: all elements are listed once, and each keeps the index of the
  first position where its image of the current prefix differs from the
  prefix, so a new block is checked in one table lookup per element;
* large group: a full minimal-image search on ``A`` plus the prefix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterator

from .core import MultiplicityVector, TwoPartition, characteristic_data
from .parallel import EXHAUSTED, RecursiveIterator, leaf_iterator, sequential_leaves
from .permgroup import PermGroup, _atoms, _sym_canonical, _sym_is_min, canonical_form, normalize_blocks

__all__ = [
    "EXHAUSTED",
    "Options",
    "GenerationState",
    "LevelIterator",
    "enumerate_multiplicity_vectors",
    "initial_state",
    "iterator_from_state",
    "next_block_group",
    "deficiency_parity_prune",
    "parity_prune_counts",
    "full_evaluation",
    "generate_all",
    "iter_generate",
]


# groups up to this order are tested element by element
SMALL_GROUP = 400


@dataclass(frozen=True)
class Options:
    prune_parity: bool = True
    prune_cap: bool = True
    prune_feasible: bool = True
    rejection: str = "orderly"  # or "app": canonicalize every group, dedupe per node


# ---------------------------------------------------------------------------
# multiplicity vectors


def enumerate_multiplicity_vectors(n: int, require_int_split: bool = False) -> list[MultiplicityVector]:
    """All census vectors satisfying the pair identity and ``sum m_k >= n``."""
    if n < 3:
        raise ValueError("n must be at least 3")
    sizes = list(range(n - 1, 1, -1))
    out = []

    def rec(i, rem, cur):
        k = sizes[i]
        if k == 2:
            m = dict(zip(sizes, cur + [rem]))
            mv = MultiplicityVector(n, m)
            if mv.total < n:
                return
            if require_int_split and characteristic_data(mv).split is None:
                return
            out.append(mv)
            return
        c = comb(k, 2)
        for x in range(rem // c, -1, -1):
            rec(i + 1, rem - x * c, cur + [x])

    rec(0, comb(n, 2), [])
    # descending lex on (m_{n-1}, ..., m_2)
    out.sort(key=lambda mv: [mv[k] for k in sizes], reverse=True)
    return out


# ---------------------------------------------------------------------------
# state


@dataclass
class GenerationState:
    n: int
    mv: MultiplicityVector
    k0: int
    A: tuple[int, ...]  # block masks (bit a-1 for atom a), normal-form order
    nbr: list[int]  # nbr[a]: atoms sharing a block with a
    dep: list[int]  # blocks of size >= 3 through each atom
    stab: PermGroup | None = None
    elements: list | None = None  # byte tables of non-identity Stab(A) elements
    depth: int = 0
    app: set = field(default_factory=set)

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(a + 1 for a in _atoms(m)) for m in self.A)

    def deficiencies(self) -> list[int]:
        return [(self.n - 1) - x.bit_count() for x in self.nbr]

    def remaining_levels(self) -> list[int]:
        return [k for k in self.mv.sizes_desc() if k <= self.k0]


def initial_state(n: int, mv: MultiplicityVector) -> GenerationState:
    if mv.n != n or not mv.is_valid():
        raise ValueError(f"{mv!r} is not a valid multiplicity vector for n={n}")
    k0 = mv.sizes_desc()[0]
    return GenerationState(n, mv, k0, (), [0] * n, [0] * n,
                           stab=None, elements=None, depth=0)


# ---------------------------------------------------------------------------
# pruning helpers


def _odd_count_ok(odd: int, m2: int) -> bool:
    """Can ``m2`` distinct pairs have exactly ``odd`` odd-degree atoms?"""
    if odd % 2 or odd > 2 * m2:
        return False
    if m2 == 0:
        return odd == 0
    if m2 == 1:
        return odd == 2
    if m2 == 2:
        return odd in (2, 4)
    return True


def parity_prune_counts(defs: list[int], remaining: dict[int, int]) -> bool:
    """True if deficiencies cannot all reach zero with the remaining blocks.

    Applies when every remaining block of size > 2 has odd size: such blocks
    change each deficiency by an even amount, and each pair changes exactly
    two of them by one.
    """
    if any(c and k % 2 == 0 and k > 2 for k, c in remaining.items()):
        return False
    odd = sum(d & 1 for d in defs)
    return not _odd_count_ok(odd, remaining.get(2, 0))


def deficiency_parity_prune(state: GenerationState) -> bool:
    rem = {k: state.mv[k] for k in state.remaining_levels()}
    return parity_prune_counts(state.deficiencies(), rem)


def _pair_need_table(n: int, counts: dict[int, int], m2: int) -> list[float]:
    """need[d]: fewest pairs an atom of deficiency d needs, inf if impossible."""
    reach = {0}
    for k, c in counts.items():
        step = k - 1
        new = set()
        for r in reach:
            for t in range(c + 1):
                v = r + t * step
                if v > n:
                    break
                new.add(v)
        reach = new
    inf = float("inf")
    need = [inf] * n
    for d in range(n):
        for c2 in range(min(d, m2) + 1):
            if d - c2 in reach:
                need[d] = c2
                break
    return need


# ---------------------------------------------------------------------------
# element tables for small stabilizers


def _rev_tables(g, n):
    """Byte tables mapping a natural mask to the reversed mask of its image."""
    tabs = []
    for base in range(0, n, 8):
        t = [0] * 256
        for v in range(1, 256):
            low = v & -v
            a = base + low.bit_length() - 1
            t[v] = t[v ^ low] | ((1 << (n - 1 - g[a])) if a < n else 0)
        tabs.append(t)
    while len(tabs) < 2:
        tabs.append([0] * 256)
    return tabs[0], tabs[1]


def _group_elements(G: PermGroup, n: int) -> list:
    ident = tuple(range(n))
    return [_rev_tables(g, n) for g in G._elements_raw() if g != ident]


def _stab_info(n, gens):
    G = PermGroup(n, gens, _raw=True)
    if G.is_trivial():
        return G, []
    if G.order() <= SMALL_GROUP:
        return G, _group_elements(G, n)
    return G, None


# ---------------------------------------------------------------------------
# the level search


class _LevelSearch:
    """Enumerates the admissible, minimal block groups of one node."""

    def __init__(self, state: GenerationState, opts: Options):
        self.s = state
        self.o = opts
        n = state.n
        self.n = n
        self.k = state.k0
        self.m = state.mv[self.k]
        self.full = (1 << n) - 1
        self.cap = (n - 1) // 2
        self.m2 = state.mv[2]
        lower = {k: state.mv[k] for k in state.mv.sizes_desc() if 2 < k < self.k}
        self.closed_need = _pair_need_table(n, lower, self.m2)
        self.open_need = []
        for r in range(self.m + 1):
            cnt = dict(lower)
            if r:
                cnt[self.k] = r
            self.open_need.append(_pair_need_table(n, cnt, self.m2))
        self.rev0, self.rev1 = _rev_tables(tuple(range(n)), n)
        self.after = {k: state.mv[k] for k in state.mv.sizes_desc() if k < self.k}

    def key(self, mask):
        # larger key = lexicographically smaller block
        return self.rev0[mask & 255] | self.rev1[mask >> 8]

    def _feasible(self, nbr, first_open, r_left):
        """Total pair demand, with atoms below ``first_open`` closed."""
        n1 = self.n - 1
        cn = self.closed_need
        on = self.open_need[r_left]
        total = 0
        for a in range(self.n):
            d = n1 - nbr[a].bit_count()
            total += cn[d] if a < first_open else on[d]
        return total <= 2 * self.m2

    def _cliques(self, x, nbr, prev, allowed):
        """Blocks of size k with smallest atom x, pairwise uncovered, lex > prev."""
        k = self.k
        out = []

        def rec(atoms, mask, cand, tight):
            d = len(atoms)
            if d == k:
                if not tight:
                    out.append((mask, atoms))
                return
            need = k - d
            lo = prev[d] if tight else -1
            c = cand
            while c and c.bit_count() >= need:
                low = c & -c
                c ^= low
                a = low.bit_length() - 1
                if a < lo:
                    continue
                rec(atoms + (a,), mask | low, c & ~nbr[a], tight and a == lo)

        start = allowed & ~nbr[x] & ~((1 << (x + 1)) - 1)
        rec((x,), 1 << x, start, prev is not None and prev[0] == x)
        return out

    @staticmethod
    def _elem_test(ist, isx, elements, keys, chosen, mask, kb, j):
        """Orderly test of ``prefix + [block]`` against every listed element.

        Keys are reversed masks, so a larger key is a lexicographically
        smaller block.  For element ``e``, ``ist[e]`` is the first index where
        the sorted image of the prefix differs from the prefix (``j`` if the
        prefix is fixed) and ``isx[e]`` the image key found there.  Returns
        ``(ok, updates)`` with updates ``(e, new index, new key)``.
        """
        upd = []
        for e, (t0, t1) in enumerate(elements):
            i = ist[e]
            gb = t0[mask & 255] | t1[mask >> 8]
            if i == j:
                if gb > kb:
                    return False, None
                upd.append((e, j + 1, -1) if gb == kb else (e, j, gb))
                continue
            if i and gb > keys[i - 1]:
                return False, None
            if gb < isx[e]:
                continue
            pk = keys[i]
            if gb > pk:
                return False, None
            if gb < pk:
                upd.append((e, i, gb))
                continue
            # the image block equals the prefix block at the first difference
            Y = sorted([t0[m & 255] | t1[m >> 8] for m in chosen] + [gb], reverse=True)
            P = keys + [kb]
            d = i
            while d <= j and Y[d] == P[d]:
                d += 1
            if d > j:
                upd.append((e, j + 1, -1))
            elif Y[d] > P[d]:
                return False, None
            else:
                upd.append((e, d, Y[d]))
        return True, upd

    def groups(self):
        """Yield (A with the new group, nbr, dep, stabilizer info)."""
        s = self.s
        opts = self.o
        n, k, m = self.n, self.k, self.m
        nbr = list(s.nbr)
        dep = list(s.dep)
        A = list(s.A)
        chosen: list[int] = []
        chosen_t: list[tuple] = []
        keys: list[int] = []
        elements = s.elements
        if opts.rejection == "app" or elements == []:
            mode = "none"
        elif elements is not None:
            mode = "elem"
        else:
            mode = "full"
        ist = [0] * len(elements) if mode == "elem" else None
        isx = [-1] * len(elements) if mode == "elem" else None
        cap = self.cap
        use_cap = opts.prune_cap and k >= 3
        feas = opts.prune_feasible

        def rec(j):
            if j == m:
                yield from self._finish(A + chosen, nbr, dep, ist, elements, mode)
                return
            prev = chosen_t[-1] if chosen_t else None
            x0 = prev[0] if prev else 0
            allowed = self.full
            if use_cap:
                for a in range(n):
                    if dep[a] >= cap:
                        allowed &= ~(1 << a)
            for x in range(x0, n):
                if feas and x > x0 and not self._feasible(nbr, x, m - j):
                    break
                if not allowed >> x & 1:
                    continue
                for mask, atoms in self._cliques(x, nbr, prev, allowed):
                    saved = [nbr[a] for a in atoms]
                    for a in atoms:
                        nbr[a] |= mask ^ (1 << a)
                    if feas and not self._feasible(nbr, x, m - j - 1):
                        for a, v in zip(atoms, saved):
                            nbr[a] = v
                        continue
                    kb = self.key(mask)
                    upd = None
                    if mode == "elem":
                        ok, upd = self._elem_test(ist, isx, elements, keys, chosen, mask, kb, j)
                    elif mode == "full":
                        ok = _sym_is_min(n, A + chosen + [mask])[0]
                    else:
                        ok = True
                    if ok:
                        if upd:
                            old = [(e, ist[e], isx[e]) for e, _, _ in upd]
                            for e, a, b in upd:
                                ist[e] = a
                                isx[e] = b
                        if k >= 3:
                            for a in atoms:
                                dep[a] += 1
                        chosen.append(mask)
                        chosen_t.append(atoms)
                        keys.append(kb)
                        yield from rec(j + 1)
                        chosen.pop()
                        chosen_t.pop()
                        keys.pop()
                        if k >= 3:
                            for a in atoms:
                                dep[a] -= 1
                        if upd:
                            for e, a, b in old:
                                ist[e] = a
                                isx[e] = b
                    for a, v in zip(atoms, saved):
                        nbr[a] = v

        yield from rec(0)

    def _finish(self, newA, nbr, dep, ist, elements, mode):
        n = self.n
        if self.o.prune_parity and self.after:
            defs = [(n - 1) - x.bit_count() for x in nbr]
            if parity_prune_counts(defs, self.after):
                return
        if self.o.rejection == "app":
            best, _ = _sym_canonical(n, newA)
            cmasks = [sum(1 << a for a in t) for t in best]
            assert cmasks[: len(self.s.A)] == list(self.s.A)
            key = tuple(cmasks[len(self.s.A):])
            if key in self.s.app:
                return
            self.s.app.add(key)
            cnbr = [0] * n
            cdep = [0] * n
            for bm in cmasks:
                for a in _atoms(bm):
                    cnbr[a] |= bm ^ (1 << a)
                    if bm.bit_count() >= 3:
                        cdep[a] += 1
            gens = _sym_is_min(n, cmasks)[1]
            yield cmasks, cnbr, cdep, _stab_info(n, gens)
            return
        if mode == "none":
            info = (None, [])
        elif mode == "elem":
            sub = [elements[e] for e in range(len(elements)) if ist[e] == self.m]
            info = (None, sub)
        else:
            ok, gens = _sym_is_min(n, newA)
            assert ok
            info = _stab_info(n, gens)
        yield list(newA), list(nbr), list(dep), info


# ---------------------------------------------------------------------------
# recursive iterators


class LevelIterator(RecursiveIterator):
    """Handle for one node; ``next()`` returns a child, a leaf or EXHAUSTED."""

    def __init__(self, state: GenerationState, opts: Options = Options()):
        self.state = state
        self.opts = opts
        self._gen = None
        self._done = False

    @property
    def depth(self) -> int:
        return self.state.depth

    def next(self):
        if self._done:
            return EXHAUSTED
        if self._gen is None:
            self._gen = self._run()
        try:
            return next(self._gen)
        except StopIteration:
            self._done = True
            self._gen = None
            self.state.app.clear()
            return EXHAUSTED

    def _run(self):
        s = self.state
        if s.k0 == 2:
            leaf = _forced_pairs(s)
            if leaf is not None:
                yield leaf
            return
        sizes = s.mv.sizes_desc()
        lower = [k for k in sizes if k < s.k0]
        for newA, nbr, dep, (G, elements) in _LevelSearch(s, self.opts).groups():
            if not lower:
                yield _to_partition(n=s.n, masks=newA)
                continue
            child = GenerationState(s.n, s.mv, lower[0], tuple(newA), nbr, dep,
                                    stab=G, elements=elements, depth=s.depth + 1)
            yield LevelIterator(child, self.opts)


def _to_partition(n, masks) -> TwoPartition:
    return TwoPartition(n, normalize_blocks(tuple(a + 1 for a in _atoms(m)) for m in masks))


def _forced_pairs(s: GenerationState):
    pairs = []
    for a in range(s.n):
        free = ~s.nbr[a] & ~((1 << (a + 1)) - 1) & ((1 << s.n) - 1)
        for b in _atoms(free):
            pairs.append((1 << a) | (1 << b))
    if len(pairs) != s.mv[2]:
        return None
    return _to_partition(s.n, list(s.A) + pairs)


def iterator_from_state(state: GenerationState, opts: Options = Options()) -> LevelIterator:
    return LevelIterator(state, opts)


def next_block_group(state: GenerationState, opts: Options = Options()) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Inner iterator over the admissible minimal groups of a node (1-based)."""
    if state.k0 == 2:
        leaf = _forced_pairs(state)
        if leaf is not None:
            yield tuple(b for b in leaf.blocks if len(b) == 2)
        return
    nA = len(state.A)
    for newA, _, _, _ in _LevelSearch(state, opts).groups():
        yield tuple(tuple(a + 1 for a in _atoms(m)) for m in newA[nA:])


def full_evaluation(t: RecursiveIterator) -> Iterator:
    """Depth-first evaluation of a recursive iterator, yielding leaves."""
    return sequential_leaves(t)


def iter_generate(n: int, mv: MultiplicityVector | None = None, workers: int = 1,
                  opts: Options = Options(), fifo_capacity: int | None = None,
                  int_split: bool = False, verify: bool = False) -> Iterator[TwoPartition]:
    """Stream all nonisomorphic matroids of size ``n`` (optionally one census only).

    Output matroids are in normal form and equal to their own minimal image.
    With one worker and no FIFO the order is deterministic.
    """
    mvs = [mv] if mv is not None else enumerate_multiplicity_vectors(n, int_split)
    for v in mvs:
        root = iterator_from_state(initial_state(n, v), opts)
        if workers <= 1 and fifo_capacity is None:
            leaves = full_evaluation(root)
        else:
            leaves = leaf_iterator(root, workers=workers, capacity=fifo_capacity)
        for M in leaves:
            if verify and canonical_form(n, M.blocks) != M.blocks:
                raise AssertionError(f"non-canonical leaf {M!r}")
            yield M


def generate_all(n: int, mv: MultiplicityVector | None = None, workers: int = 1,
                 opts: Options = Options(), fifo_capacity: int | None = None,
                 int_split: bool = False, verify: bool = False) -> list[TwoPartition]:
    return list(iter_generate(n, mv, workers, opts, fifo_capacity, int_split, verify))
