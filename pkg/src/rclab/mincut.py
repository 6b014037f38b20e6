"""Minimal-cut estimate of the Hartley entropy of a monitored brickwork circuit.

Geometry (time steps ``s = 0..T-1``, sites ``x = 0..L-1``):

* step ``s`` acts on bonds ``(x, x+1)`` with ``x ≡ s (mod 2)``;
* leg ``(x, t)`` is the wire of site ``x`` between steps ``t-1`` and ``t``;
  leg ``(x, 0)`` is the initial wire and ``(x, T)`` the final one.  A
  measurement after step ``s`` sits on leg ``(x, s+1)``;
* the dual lattice has one face ``F(x, s)`` for each ``s ≡ x (mod 2)``,
  ``-2 <= s <= T-1``; it is the diamond between sites ``x`` and ``x+1``
  with legs ``(x, s+1), (x, s+2), (x+1, s+1), (x+1, s+2)``.  Faces with
  ``s < 0`` touch the initial product state; faces with ``s >= T-2`` touch
  the final time.

::

      t=s+2  x|     |x+1        F(x, s) is the region bounded by four gates;
             x|  F  |x+1        the cut moves to F(x±1, s±1) across one leg.
      t=s+1  x|     |x+1

A wire piece is a maximal run of legs of one site between two gates that
touch it; on an open chain the edge sites idle on alternate steps so their
pieces span two legs.  Crossing a leg costs 1 unless its piece carries a
measurement.  The cut starts at the final-time face at each endpoint of the
region and ends on the initial-time boundary (or a free chain edge); the
cheapest cut is found by 0-1 breadth-first search.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable

import numpy as np

__all__ = ["MinCutGraph", "hartley_min_cut", "leg_costs"]


def leg_costs(L: int, T: int, measured: np.ndarray, periodic: bool) -> np.ndarray:
    """Cost of crossing leg ``(x, t)``, shape ``(L, T+1)``."""
    measured = np.asarray(measured, dtype=bool)
    if measured.shape != (T, L):
        raise ValueError(f"measurement layout must have shape ({T}, {L})")
    cost = np.ones((L, T + 1), dtype=np.int64)
    for x in range(L):
        gates = [s for s in range(T) if _in_gate(x, s, L, periodic)]
        bounds = [-1] + gates + [T]
        for g0, g1 in zip(bounds[:-1], bounds[1:]):
            # piece covers legs g0+1 .. g1 (measurements after steps g0 .. g1-1)
            lo, hi = g0 + 1, g1
            if hi < lo:
                continue
            s_lo, s_hi = max(g0, 0), min(g1 - 1, T - 1)
            if s_lo <= s_hi and measured[s_lo : s_hi + 1, x].any():
                cost[x, lo : hi + 1] = 0
    return cost


def _in_gate(x: int, s: int, L: int, periodic: bool) -> bool:
    left = x if x % 2 == s % 2 else x - 1  # left site of the bond containing x at step s
    if periodic:
        return True
    return 0 <= left and left + 1 <= L - 1


class MinCutGraph:
    """Dual lattice with 0/1 edge weights and boundary terminals."""

    def __init__(self, L: int, T: int, measured: np.ndarray, periodic: bool = False):
        if L < 2 or L % 2:
            raise ValueError("L must be even and at least 2")
        self.L, self.T, self.periodic = L, T, periodic
        self.cost = leg_costs(L, T, measured, periodic)

    def _norm(self, x):
        if self.periodic:
            return x % self.L
        return x

    def neighbors(self, x: int, s: int):
        """Yield ``(face or terminal, weight)`` pairs adjacent to face ``F(x, s)``."""
        for dx, ds, leg_x, leg_t in (
            (-1, -1, x, s + 1),
            (-1, +1, x, s + 2),
            (+1, -1, x + 1, s + 1),
            (+1, +1, x + 1, s + 2),
        ):
            nx, ns = x + dx, s + ds
            if leg_t > self.T or ns > self.T - 1:
                continue
            lx = self._norm(leg_x)
            if not 0 <= lx < self.L:
                continue
            w = int(self.cost[lx, leg_t])
            nx = self._norm(nx)
            if ns < 0:
                yield "BOTTOM", w
            elif not self.periodic and nx < 0:
                yield "LEFT", w
            elif not self.periodic and nx > self.L - 2:
                yield "RIGHT", w
            else:
                yield (nx, ns), w

    def top_face(self, b: int) -> tuple[int, int]:
        """Final-time face between sites ``b-1`` and ``b``."""
        x = self._norm(b - 1)
        s = self.T - 1 if (self.T - 1) % 2 == x % 2 else self.T - 2
        return x, s

    def distances(self, start) -> dict:
        if not isinstance(start, str) and start[1] < 0:
            return {start: 0, "BOTTOM": 0}  # face already touches the initial state
        dist = {start: 0}
        dq = deque([start])
        while dq:
            u = dq.popleft()
            if isinstance(u, str):
                continue
            for v, w in self.neighbors(*u):
                nd = dist[u] + w
                if nd < dist.get(v, 1 << 60):
                    dist[v] = nd
                    dq.appendleft(v) if w == 0 else dq.append(v)
        return dist


def _terminal_distance(dist: dict) -> int:
    return min(dist.get(k, 1 << 60) for k in ("BOTTOM", "LEFT", "RIGHT"))


def hartley_min_cut(
    L: int,
    T: int,
    measured: np.ndarray,
    region: Iterable[int],
    boundary: str = "open",
) -> int:
    """Minimal number of unmeasured wire pieces a cut around ``region`` must sever.

    ``region`` must be a contiguous interval (cyclically, for a ring).  This
    upper-bounds the zeroth Rényi entropy of the final state in bits.
    """
    periodic = boundary == "periodic"
    sites = sorted(set(int(v) for v in region))
    if not sites or len(sites) == L:
        return 0
    g = MinCutGraph(L, T, measured, periodic)
    inside = np.zeros(L, dtype=bool)
    inside[sites] = True
    ends = [b for b in range(L + (0 if periodic else 1)) if _is_edge(inside, b, L, periodic)]
    if T == 0:
        return 0
    faces = [g.top_face(b) for b in ends]
    if len(faces) == 1:
        return _terminal_distance(g.distances(faces[0]))
    if len(faces) != 2:
        raise ValueError("region must be a single contiguous interval")
    d0 = g.distances(faces[0])
    d1 = g.distances(faces[1])
    return int(min(_terminal_distance(d0) + _terminal_distance(d1), d0.get(faces[1], 1 << 60)))


def _is_edge(inside, b, L, periodic) -> bool:
    """Whether the cut point between sites ``b-1`` and ``b`` separates the region."""
    if periodic:
        return inside[(b - 1) % L] != inside[b % L]
    if b == 0 or b == L:
        return False
    return inside[b - 1] != inside[b]
