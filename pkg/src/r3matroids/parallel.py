"""Parallel evaluation of recursive iterators.

A recursive iterator is a pull-based producer: each ``next()`` returns a
child iterator, a leaf, or ``EXHAUSTED`` (and keeps returning ``EXHAUSTED``
afterwards).  Workers share a priority queue of iterators keyed by depth,
deeper first, so the frontier stays small.  Leaves go into a bounded FIFO
closed by a single sentinel once the job counter drops to zero.

Python threads share one interpreter lock, so the pool buys concurrency of
bookkeeping, not CPU speedup.  The protocol is what matters here: the same
handles could be driven by any other executor.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import queue
import threading
from typing import Any, Iterator

__all__ = [
    "EXHAUSTED",
    "SENTINEL",
    "NextAfterDone",
    "RecursiveIterator",
    "PriorityQueue",
    "LeafFIFO",
    "SharedCounters",
    "Shared",
    "parallel_evaluate",
    "worker_loop",
    "leaf_iterator",
    "LeafStream",
    "sequential_leaves",
    "MatchedParentheses",
    "MagmaEvaluation",
    "ListTree",
]

log = logging.getLogger(__name__)


class _Marker:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


EXHAUSTED = _Marker("EXHAUSTED")
SENTINEL = _Marker("SENTINEL")


class NextAfterDone(RuntimeError):
    pass


class RecursiveIterator:
    """Base class; subclasses implement :meth:`next`."""

    def next(self) -> Any:
        raise NotImplementedError


class PriorityQueue:
    """Max-priority queue; equal priorities pop most recent first."""

    def __init__(self):
        self._heap: list = []
        self._seq = itertools.count()
        self._lock = threading.Lock()

    def push(self, item, priority: int) -> None:
        with self._lock:
            heapq.heappush(self._heap, (-priority, -next(self._seq), item))

    def pop(self):
        """Return ``(item, priority)`` or ``None`` when empty."""
        with self._lock:
            if not self._heap:
                return None
            p, _, item = heapq.heappop(self._heap)
            return item, -p

    def __len__(self):
        with self._lock:
            return len(self._heap)


class LeafFIFO:
    """Bounded FIFO of leaves followed by one sentinel; ``capacity=None`` is unbounded."""

    def __init__(self, capacity: int | None = None):
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be at least 1")
        self.capacity = capacity
        self._q: queue.Queue = queue.Queue(maxsize=capacity or 0)
        self._closed = False
        self._lock = threading.Lock()

    def put(self, leaf) -> None:
        self._q.put(leaf)

    def close(self) -> None:
        with self._lock:
            if self._closed:
                return
            self._closed = True
        self._q.put(SENTINEL)

    def get(self, timeout: float | None = None):
        return self._q.get(timeout=timeout)


class SharedCounters:
    """Job counter ``j`` and work semaphore ``s``."""

    def __init__(self, jobs: int = 1):
        self.j = jobs
        self.s = threading.Semaphore(0)
        self._lock = threading.Lock()

    def add(self, delta: int) -> int:
        with self._lock:
            self.j += delta
            return self.j


class Shared:
    """Everything the workers of one run share."""

    def __init__(self, fifo: LeafFIFO, workers: int, locally_uniform: bool = False):
        self.P = PriorityQueue()
        self.L = fifo
        self.c = SharedCounters(1)
        self.workers = workers
        self.locally_uniform = locally_uniform
        self.diagnostics: list[str] = []
        self.threads: list[threading.Thread] = []


def _is_child(r) -> bool:
    return isinstance(r, RecursiveIterator)


def _safe_next(t, shared: Shared):
    try:
        return t.next()
    except Exception as exc:  # a broken handle must not block termination
        msg = f"iterator {t!r} failed: {exc!r}"
        log.warning(msg)
        shared.diagnostics.append(msg)
        return EXHAUSTED


def worker_loop(shared: Shared) -> None:
    P, L, c = shared.P, shared.L, shared.c
    while True:
        c.s.acquire()
        job = P.pop()
        if job is None:
            return
        t, p = job
        r = _safe_next(t, shared)
        if shared.locally_uniform:
            while r is not EXHAUSTED and not _is_child(r):
                L.put(r)
                r = _safe_next(t, shared)
        elif r is not EXHAUSTED and not _is_child(r):
            L.put(r)
            P.push(t, p)
            c.s.release()
            continue
        if _is_child(r):
            # count the child before any worker can see it, or a child that
            # exhausts at once may drive j to zero while t still has work
            c.add(1)
            P.push(t, p)
            c.s.release()
            P.push(r, p + 1)
            c.s.release()
            continue
        if c.add(-1) == 0:
            L.close()
            for _ in range(shared.workers):
                c.s.release()


def parallel_evaluate(t: RecursiveIterator, workers: int, fifo: LeafFIFO,
                      locally_uniform: bool = False) -> Shared:
    """Start the pool and return immediately; leaves then sentinel land in ``fifo``."""
    if workers < 1:
        raise ValueError("workers must be positive")
    shared = Shared(fifo, workers, locally_uniform)
    shared.P.push(t, 0)
    for i in range(workers):
        th = threading.Thread(target=worker_loop, args=(shared,), name=f"worker-{i}", daemon=True)
        shared.threads.append(th)
        th.start()
    shared.c.s.release()
    return shared


class LeafStream:
    """Pull side of the FIFO; peeks without consuming the sentinel."""

    def __init__(self, fifo: LeafFIFO, shared: Shared):
        self.fifo = fifo
        self.shared = shared
        self._head = None
        self._has_head = False

    def _peek(self):
        if not self._has_head:
            self._head = self.fifo.get()
            self._has_head = True
        return self._head

    def is_done(self) -> bool:
        return self._peek() is SENTINEL

    def next(self):
        head = self._peek()
        if head is SENTINEL:
            raise NextAfterDone("leaf stream already exhausted")
        self._has_head = False
        self._head = None
        return head

    def __iter__(self) -> Iterator:
        while not self.is_done():
            yield self.next()
        self.join()

    def join(self, timeout: float | None = None) -> bool:
        for th in self.shared.threads:
            th.join(timeout)
        return not any(th.is_alive() for th in self.shared.threads)


def leaf_iterator(t: RecursiveIterator, workers: int = 1, capacity: int | None = None,
                  locally_uniform: bool = False) -> LeafStream:
    fifo = LeafFIFO(capacity)
    shared = parallel_evaluate(t, workers, fifo, locally_uniform)
    return LeafStream(fifo, shared)


def sequential_leaves(t: RecursiveIterator) -> Iterator:
    """Depth-first full evaluation in the calling thread."""
    stack = [t]
    while stack:
        r = stack[-1].next()
        if r is EXHAUSTED:
            stack.pop()
        elif _is_child(r):
            stack.append(r)
        else:
            yield r


# ---------------------------------------------------------------------------
# small recursive iterators used to exercise the scheduler


class _GenIterator(RecursiveIterator):
    def __init__(self):
        self._gen = None
        self._done = False

    def _children(self):
        raise NotImplementedError

    def next(self):
        if self._done:
            return EXHAUSTED
        if self._gen is None:
            self._gen = self._children()
        try:
            return next(self._gen)
        except StopIteration:
            self._done = True
            self._gen = None
            return EXHAUSTED


class MatchedParentheses(_GenIterator):
    """Strings of ``n`` matched pairs; a child inserts "()" as the leftmost empty pair."""

    def __init__(self, n: int, word: str = "()"):
        super().__init__()
        self.n = n
        self.word = word

    def _children(self):
        w = self.word
        pairs = len(w) // 2
        if pairs >= self.n:
            return
        seen = set()
        for p in range(len(w) + 1):
            new = w[:p] + "()" + w[p:]
            if new.find("()") != p or new in seen:
                continue
            seen.add(new)
            if pairs + 1 == self.n:
                yield new
            else:
                yield MatchedParentheses(self.n, new)

    def __repr__(self):
        return f"MatchedParentheses({self.n}, {self.word!r})"


class MagmaEvaluation(_GenIterator):
    """Bracketings of ``a0 ... an``, refined one parenthesis depth at a time.

    A node is a partially bracketed word whose unresolved segments all sit at
    the same depth; a child splits every such segment in two.
    """

    def __init__(self, n: int, expr=None):
        super().__init__()
        self.n = n
        letters = "abcdefghijklmnopqrstuvwxyz"
        self.expr = expr if expr is not None else ("flat", letters[: n + 1])

    @classmethod
    def _refine(cls, e):
        kind = e[0] if isinstance(e, tuple) else "leaf"
        if kind == "flat":
            seg = e[1]
            for i in range(1, len(seg)):
                yield ("pair", cls._node(seg[:i]), cls._node(seg[i:]))
        elif kind == "pair":
            for left in cls._refine(e[1]):
                for right in cls._refine(e[2]):
                    yield ("pair", left, right)
        else:
            yield e

    @classmethod
    def _node(cls, seg):
        if len(seg) == 1:
            return ("leaf", seg)
        if len(seg) == 2:
            return ("pair", ("leaf", seg[0]), ("leaf", seg[1]))
        return ("flat", seg)

    @classmethod
    def _complete(cls, e):
        if e[0] == "flat":
            return False
        if e[0] == "pair":
            return cls._complete(e[1]) and cls._complete(e[2])
        return True

    @classmethod
    def render(cls, e, top=True):
        if e[0] == "leaf":
            return e[1]
        if e[0] == "flat":
            return e[1] if top else "(" + e[1] + ")"
        s = cls.render(e[1], False) + cls.render(e[2], False)
        return s if top else "(" + s + ")"

    def _children(self):
        if self._complete(self.expr):
            return
        for e in self._refine(self.expr):
            if self._complete(e):
                yield self.render(e)
            else:
                yield MagmaEvaluation(self.n, e)

    def __repr__(self):
        return f"MagmaEvaluation({self.render(self.expr)!r})"


class ListTree(_GenIterator):
    """Explicit tree: a node is a list whose items are leaves or nested lists."""

    def __init__(self, items):
        super().__init__()
        self.items = items

    def _children(self):
        for it in self.items:
            yield ListTree(it) if isinstance(it, list) else it
