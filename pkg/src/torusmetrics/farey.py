"""Rational slopes on the torus and their Stern-Brocot/Farey combinatorics.

A slope p/q labels the isotopy class of an essential simple closed curve on
the (punctured) torus.  Two slopes are Farey neighbors when |p1*q2 - q1*p2|
is 1; the mediant of a neighbor pair splits their interval, and iterating
this builds the Stern-Brocot tree, which reaches every slope exactly once.
All suprema over curves in this package are searched by descending that
tree, so the node type below doubles as the search cell of the sup engine.

Negative slopes carry p < 0, q > 0.  The tree over them is the mirror image
(p -> -p) of the positive tree, which keeps one canonical label per curve
class and avoids double counting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "Slope",
    "FareyNode",
    "mediant",
    "intersection_number",
    "enumerate_slopes",
    "slope_parents",
    "root_nodes",
    "MAX_ENUM_DEPTH",
]

# Exhaustive enumeration grows as 3 * 2**depth; refuse to blow up silently.
MAX_ENUM_DEPTH = 22


@dataclass(frozen=True, order=True)
class Slope:
    """A primitive integer pair p/q in canonical form.

    Canonical means q > 0, or (p, q) == (1, 0) for the slope at infinity.
    Python integers never wrap, so arbitrarily deep descent is exact.
    """

    p: int
    q: int

    def __post_init__(self):
        if self.q == 0:
            if self.p != 1:
                raise ValueError(f"slope {self.p}/{self.q} is not canonical; infinity is 1/0")
            return
        if self.q < 0:
            raise ValueError(f"slope {self.p}/{self.q} is not canonical; q must be positive")
        if math.gcd(abs(self.p), self.q) != 1:
            raise ValueError(f"slope {self.p}/{self.q} is not primitive")

    @classmethod
    def of(cls, p: int, q: int) -> "Slope":
        """Canonicalize an arbitrary nonzero integer pair."""
        if p == 0 and q == 0:
            raise ValueError("the zero pair is not a slope")
        if q == 0:
            return cls(1, 0)
        if q < 0:
            p, q = -p, -q
        g = math.gcd(abs(p), q)
        return cls(p // g, q // g)

    @classmethod
    def parse(cls, text: str) -> "Slope":
        num, _, den = text.partition("/")
        if not _:
            raise ValueError(f"slope must look like 'p/q', got {text!r}")
        return cls.of(int(num), int(den))

    def mirrored(self) -> "Slope":
        """The slope reflected by p -> -p (fixes 0/1 and 1/0)."""
        return Slope.of(-self.p, self.q)

    def direction(self) -> tuple[float, float]:
        return (float(self.p), float(self.q))

    def __str__(self):
        return f"{self.p}/{self.q}"


def mediant(a: Slope, b: Slope) -> Slope:
    """Mediant of a Farey neighbor pair; rejects non-neighbors."""
    det = a.p * b.q - a.q * b.p
    if abs(det) != 1:
        raise ValueError(f"{a} and {b} are not Farey neighbors (determinant {det})")
    return Slope.of(a.p + b.p, a.q + b.q)


def intersection_number(a: Slope, b: Slope) -> int:
    """Geometric intersection number of the two curve classes, |p1 q2 - q1 p2|."""
    return abs(a.p * b.q - a.q * b.p)


@dataclass(frozen=True)
class FareyNode:
    """A Stern-Brocot interval: the search cell for suprema over slopes.

    ``left`` and ``right`` are always stored as positive-tree endpoints;
    ``mirrored`` marks cells of the negative-slope copy of the tree.  The
    slope a node contributes is the (possibly mirrored) mediant of its
    endpoints, and ``depth`` counts mediant steps from the root interval.
    """

    left: Slope
    right: Slope
    depth: int
    mirrored: bool = False

    def __post_init__(self):
        det = self.left.p * self.right.q - self.left.q * self.right.p
        if abs(det) != 1:
            raise ValueError(f"node endpoints {self.left}, {self.right} are not Farey neighbors")
        if self.depth < 0:
            raise ValueError("node depth must be nonnegative")

    def mediant_slope(self) -> Slope:
        m = Slope(self.left.p + self.right.p, self.left.q + self.right.q)
        return m.mirrored() if self.mirrored else m

    def children(self) -> tuple["FareyNode", "FareyNode"]:
        m = Slope(self.left.p + self.right.p, self.left.q + self.right.q)
        return (
            FareyNode(self.left, m, self.depth + 1, self.mirrored),
            FareyNode(m, self.right, self.depth + 1, self.mirrored),
        )

    def direction_pair(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """Endpoint direction vectors in the (p, q) plane, mirror applied.

        The mirrored copy of 1/0 is reported as (-1, 0) so that the two
        root cells together span every direction up to sign.
        """
        sign = -1.0 if self.mirrored else 1.0
        return (
            (sign * self.left.p, float(self.left.q)),
            (sign * self.right.p, float(self.right.q)),
        )

    def endpoint_slopes(self) -> tuple[Slope, Slope]:
        """The curve classes of the interval endpoints, mirror applied."""
        if not self.mirrored:
            return (self.left, self.right)
        return (self.left.mirrored(), self.right.mirrored())

    def opposite_slope(self) -> Slope:
        """The completion of the endpoint edge on the far side of the mediant."""
        c = Slope.of(self.left.p - self.right.p, self.left.q - self.right.q)
        return c.mirrored() if self.mirrored else c


def root_nodes() -> tuple[FareyNode, FareyNode]:
    """The two root intervals covering positive and negative slopes.

    The positive root's mediant is 1/1 at depth 0; the mirrored root sits
    at depth 1 so its mediant -1/1 counts as the first negative-side step.
    """
    zero, inf = Slope(0, 1), Slope(1, 0)
    return FareyNode(zero, inf, 0), FareyNode(zero, inf, 1, mirrored=True)


def enumerate_slopes(max_depth: int) -> list[Slope]:
    """All slopes of tree depth <= max_depth, roots first, each exactly once.

    Depth 0 is the three root slopes 0/1, 1/0, 1/1; depth d >= 1 adds the
    2**d positive mediants and the mirrored tier, for 3 * 2**d in total.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be nonnegative")
    if max_depth > MAX_ENUM_DEPTH:
        raise ValueError(
            f"enumeration to depth {max_depth} would produce {3 * 2 ** max_depth} slopes; "
            f"the supported limit is depth {MAX_ENUM_DEPTH}"
        )
    pos_root, neg_root = root_nodes()
    out = [Slope(0, 1), Slope(1, 0), pos_root.mediant_slope()]
    frontier = [*pos_root.children(), neg_root]
    while frontier:
        next_frontier = []
        for node in frontier:
            if node.depth > max_depth:
                continue
            out.append(node.mediant_slope())
            next_frontier.extend(node.children())
        frontier = next_frontier
    return out


def slope_parents(s: Slope) -> tuple[Slope, Slope, Slope]:
    """Farey parents (a, b) of s plus the opposite vertex c.

    a and b are the neighbor pair spanning the edge below s in the Farey
    tessellation; s and c are the classes of a + b and a - b, the two
    completions of that edge into a triangle.  (On the negative wedge the
    canonical form of the infinity endpoint hides a sign, so s is not
    always literally the canonical mediant of a and b.)  Trace recursions
    combine values at a, b, c into the value at s.
    """
    p, q = s.p, s.q
    if (p, q) in ((0, 1), (1, 0)):
        raise ValueError(f"root slope {s} has no Farey parents")
    if p < 0:
        a, b, c = slope_parents(Slope(-p, q))
        return a.mirrored(), b.mirrored(), c.mirrored()
    if p == 1 and q == 1:
        return Slope(1, 0), Slope(0, 1), Slope(-1, 1)
    if q == 1:  # p >= 2
        return Slope(p - 1, 1), Slope(1, 0), Slope.of(p - 2, 1)
    if p == 1:  # q >= 2
        return Slope(1, q - 1), Slope(0, 1), Slope.of(1, q - 2)
    u = pow(q, -1, p)
    v = (u * q - 1) // p
    return Slope(u, v), Slope(p - u, q - v), Slope.of(2 * u - p, 2 * v - q)
