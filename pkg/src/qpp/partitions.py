"""Enumeration of set partitions and non-crossing partitions.

Both enumerators are test oracles: Bell/Catalan growth keeps them out of any
production path, so the bounds here are deliberately small.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import TooLarge

Block = tuple[int, ...]


@dataclass(frozen=True)
class NCPartition:
    """A non-crossing partition of {1..k}, blocks sorted by minimum."""

    blocks: tuple[Block, ...]

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self):
        return len(self.blocks)


def set_partitions(n: int) -> Iterator[tuple[Block, ...]]:
    """All partitions of {1..n} via restricted growth strings."""
    if n < 1:
        raise ValueError("need n >= 1")
    if n > 10:
        raise TooLarge(f"refusing to enumerate B_{n} set partitions")
    rgs = [0] * n

    def rec(i: int, maxval: int):
        if i == n:
            nblocks = maxval + 1
            blocks = [[] for _ in range(nblocks)]
            for idx, b in enumerate(rgs):
                blocks[b].append(idx + 1)
            yield tuple(tuple(b) for b in blocks)
            return
        for v in range(maxval + 2):
            rgs[i] = v
            yield from rec(i + 1, max(maxval, v))

    rgs[0] = 0
    yield from rec(1, 0)


def is_noncrossing(blocks: tuple[Block, ...]) -> bool:
    """True iff no a < b < c < d has {a,c} and {b,d} in different blocks."""
    owner = {}
    for bi, blk in enumerate(blocks):
        for x in blk:
            owner[x] = bi
    elems = sorted(owner)
    stack: list[int] = []
    # Scan left to right keeping the stack of currently-open blocks; a
    # partition is non-crossing iff blocks close in LIFO order.
    remaining = {bi: len(blk) for bi, blk in enumerate(blocks)}
    for x in elems:
        b = owner[x]
        if not stack or stack[-1] != b:
            if b in stack:
                return False
            stack.append(b)
        remaining[b] -= 1
        if remaining[b] == 0:
            stack.pop()
    return True


def nc_partitions(k: int) -> list[NCPartition]:
    """All non-crossing partitions of {1..k}; the count is Catalan(k)."""
    if k < 1:
        raise ValueError("need k >= 1")
    if k > 12:
        raise TooLarge("non-crossing enumeration capped at k = 12")

    def gen(elems: tuple[int, ...]) -> Iterator[tuple[Block, ...]]:
        if not elems:
            yield ()
            return
        first, rest = elems[0], elems[1:]
        m = len(rest)
        # Choose the rest of first's block; the gaps between consecutive
        # chosen elements (and the tail) partition independently.
        for mask in range(1 << m):
            chosen = [rest[i] for i in range(m) if mask >> i & 1]
            block = (first, *chosen)
            segments = []
            prev = 0
            for c in chosen:
                seg = tuple(e for e in rest[prev:] if e < c)
                prev += len(seg) + 1
                segments.append(seg)
            segments.append(rest[prev:])
            partial: list[tuple[Block, ...]] = [()]
            for seg in segments:
                partial = [p + sub for p in partial for sub in gen(seg)]
            for p in partial:
                yield (block, *p)

    out = [
        NCPartition(tuple(sorted(blocks, key=lambda b: b[0])))
        for blocks in gen(tuple(range(1, k + 1)))
    ]
    return out
