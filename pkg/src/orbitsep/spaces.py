"""Exact-rational metric spaces.

Built-in spaces:

* ``zd`` — integer lattice points of a fixed dimension under l1 or linf.
* ``free`` — reduced words over ``rank`` letters under the word metric
  ``d(u, v) = |u^-1 v|``.
* ``discrete_shift`` — the integers under the 0/1 discrete metric.
* ``finite_graph`` — vertices of a connected weighted graph under the
  shortest-path metric (all pairs precomputed at construction).
* ``scaled`` — any inner space with distances multiplied by a positive
  rational constant.
* ``discrete`` — any inner space re-equipped with the 0/1 discrete metric.

Distances are ints or Fractions, never floats; the only non-finite value is
the ``INF`` sentinel returned by ``set_distance`` on an empty side.  Space
values are immutable after construction and every operation here is a pure
function, so they are safe to share between threads.
"""

from fractions import Fraction

from .errors import InvalidInputError
from .rationals import INF, format_rational, parse_rational

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


class MetricSpace:
    """Base class: a point universe plus an exact distance function."""

    kind = "abstract"

    def distance(self, p, q):
        raise NotImplementedError

    def check_point(self, p):
        """Raise InvalidInputError unless p belongs to this space."""
        raise NotImplementedError

    def point_to_json(self, p):
        raise NotImplementedError

    def point_from_json(self, obj):
        raise NotImplementedError

    def universe(self):
        """All points of a finite space, or None when infinite."""
        return None

    def to_json(self):
        raise NotImplementedError

    def describe(self):
        return self.kind


def _check_int(x, what):
    if not isinstance(x, int) or isinstance(x, bool):
        raise InvalidInputError(f"{what} must be an int, got {x!r}")


class ZdSpace(MetricSpace):
    """Integer lattice of a fixed dimension under the l1 or linf norm."""

    kind = "zd"

    def __init__(self, dim, norm="linf"):
        _check_int(dim, "dimension")
        if dim < 1:
            raise InvalidInputError("dimension must be >= 1")
        if norm not in ("l1", "linf"):
            raise InvalidInputError(f"norm must be 'l1' or 'linf', got {norm!r}")
        self.dim = dim
        self.norm = norm

    def distance(self, p, q):
        if self.norm == "l1":
            return sum(abs(a - b) for a, b in zip(p, q))
        return max(abs(a - b) for a, b in zip(p, q))

    def check_point(self, p):
        if not isinstance(p, tuple) or len(p) != self.dim:
            raise InvalidInputError(f"expected a {self.dim}-tuple of ints, got {p!r}")
        for c in p:
            _check_int(c, "lattice coordinate")

    def point_to_json(self, p):
        return list(p)

    def point_from_json(self, obj):
        if not isinstance(obj, list):
            raise InvalidInputError(f"lattice point must be a JSON array, got {obj!r}")
        p = tuple(obj)
        self.check_point(p)
        return p

    def to_json(self):
        return {"kind": "zd", "dim": self.dim, "norm": self.norm}

    def describe(self):
        return f"zd(dim={self.dim}, {self.norm})"


class FreeSpace(MetricSpace):
    """Reduced words over ``rank`` letters under the word metric.

    ``d(u, v) = |u^-1 v|`` equals ``len(u) + len(v) - 2 * lcp(u, v)`` where
    ``lcp`` is the longest common prefix, since cancellation in ``u^-1 v``
    happens exactly along the shared prefix.
    """

    kind = "free"

    def __init__(self, rank):
        _check_int(rank, "rank")
        if not 1 <= rank <= len(_LETTERS):
            raise InvalidInputError(f"rank must be in 1..{len(_LETTERS)}")
        self.rank = rank

    def distance(self, p, q):
        i = 0
        m = min(len(p), len(q))
        while i < m and p[i] == q[i]:
            i += 1
        return len(p) + len(q) - 2 * i

    def check_point(self, p):
        if not isinstance(p, tuple):
            raise InvalidInputError(f"free-group point must be a word tuple, got {p!r}")
        for s in p:
            _check_int(s, "word letter")
            if s == 0 or abs(s) > self.rank:
                raise InvalidInputError(f"letter {s} outside rank-{self.rank} alphabet")
        for k in range(len(p) - 1):
            if p[k] == -p[k + 1]:
                raise InvalidInputError(f"word {p!r} is not reduced")

    def point_to_json(self, p):
        return word_to_string(p)

    def point_from_json(self, obj):
        if not isinstance(obj, str):
            raise InvalidInputError(f"free-group point must be a string, got {obj!r}")
        p = word_from_string(obj)
        self.check_point(p)
        return p

    def to_json(self):
        return {"kind": "free", "rank": self.rank}

    def describe(self):
        return f"free(rank={self.rank})"


def word_to_string(word):
    """Render a signed-letter word as e.g. ``"ab'a"`` (``'`` marks inverses)."""
    out = []
    for s in word:
        out.append(_LETTERS[abs(s) - 1])
        if s < 0:
            out.append("'")
    return "".join(out)


def word_from_string(text):
    """Parse ``"ab'a"`` notation into a signed-letter tuple."""
    letters = []
    for ch in text:
        if ch == "'":
            if not letters:
                raise InvalidInputError(f"dangling inverse mark in {text!r}")
            letters[-1] = -letters[-1]
        elif ch in _LETTERS:
            letters.append(_LETTERS.index(ch) + 1)
        else:
            raise InvalidInputError(f"bad character {ch!r} in word {text!r}")
    return tuple(letters)


class DiscreteShiftSpace(MetricSpace):
    """The integers under the discrete metric."""

    kind = "discrete_shift"

    def distance(self, p, q):
        return 0 if p == q else 1

    def check_point(self, p):
        _check_int(p, "point")

    def point_to_json(self, p):
        return p

    def point_from_json(self, obj):
        self.check_point(obj)
        return obj

    def to_json(self):
        return {"kind": "discrete_shift"}


class FiniteGraphSpace(MetricSpace):
    """Shortest-path metric on a connected weighted graph.

    The all-pairs table is computed once at construction (Floyd-Warshall over
    Fractions), so lookups are O(1) and exact.
    """

    kind = "finite_graph"

    def __init__(self, n, edges):
        _check_int(n, "vertex count")
        if n < 1:
            raise InvalidInputError("vertex count must be >= 1")
        self.n = n
        self.edges = []
        table = [[None] * n for _ in range(n)]
        for i in range(n):
            table[i][i] = Fraction(0)
        for edge in edges:
            if len(edge) != 3:
                raise InvalidInputError(f"edge must be [i, j, weight], got {edge!r}")
            i, j, w = edge
            _check_int(i, "edge endpoint")
            _check_int(j, "edge endpoint")
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidInputError(f"edge endpoint out of range in {edge!r}")
            if i == j:
                raise InvalidInputError(f"self-loop {edge!r} not allowed")
            weight = parse_rational(w)
            if weight == INF or weight <= 0:
                raise InvalidInputError(f"edge weight must be a positive rational, got {w!r}")
            self.edges.append((i, j, weight))
            if table[i][j] is None or weight < table[i][j]:
                table[i][j] = weight
                table[j][i] = weight
        for k in range(n):
            row_k = table[k]
            for i in range(n):
                ik = table[i][k]
                if ik is None:
                    continue
                row_i = table[i]
                for j in range(n):
                    kj = row_k[j]
                    if kj is None:
                        continue
                    via = ik + kj
                    if row_i[j] is None or via < row_i[j]:
                        row_i[j] = via
        for i in range(n):
            for j in range(n):
                if table[i][j] is None:
                    raise InvalidInputError("graph is not connected")
        self._table = table

    def distance(self, p, q):
        return self._table[p][q]

    def check_point(self, p):
        _check_int(p, "vertex")
        if not 0 <= p < self.n:
            raise InvalidInputError(f"vertex {p} out of range 0..{self.n - 1}")

    def point_to_json(self, p):
        return p

    def point_from_json(self, obj):
        self.check_point(obj)
        return obj

    def universe(self):
        return list(range(self.n))

    def to_json(self):
        return {
            "kind": "finite_graph",
            "n": self.n,
            "edges": [[i, j, format_rational(w)] for i, j, w in self.edges],
        }

    def describe(self):
        return f"finite_graph(n={self.n})"


class ScaledSpace(MetricSpace):
    """An inner space with every distance multiplied by a positive rational."""

    kind = "scaled"

    def __init__(self, inner, factor):
        factor = parse_rational(factor)
        if factor == INF or factor <= 0:
            raise InvalidInputError("scale factor must be a positive rational")
        self.inner = inner
        self.factor = Fraction(factor)

    def distance(self, p, q):
        return self.factor * self.inner.distance(p, q)

    def check_point(self, p):
        self.inner.check_point(p)

    def point_to_json(self, p):
        return self.inner.point_to_json(p)

    def point_from_json(self, obj):
        return self.inner.point_from_json(obj)

    def universe(self):
        return self.inner.universe()

    def to_json(self):
        return {
            "kind": "scaled",
            "factor": format_rational(self.factor),
            "inner": self.inner.to_json(),
        }

    def describe(self):
        return f"scaled({format_rational(self.factor)} * {self.inner.describe()})"


class DiscreteAdapterSpace(MetricSpace):
    """An inner space's points re-equipped with the 0/1 discrete metric."""

    kind = "discrete"

    def __init__(self, inner):
        self.inner = inner

    def distance(self, p, q):
        return 0 if p == q else 1

    def check_point(self, p):
        self.inner.check_point(p)

    def point_to_json(self, p):
        return self.inner.point_to_json(p)

    def point_from_json(self, obj):
        return self.inner.point_from_json(obj)

    def universe(self):
        return self.inner.universe()

    def to_json(self):
        return {"kind": "discrete", "inner": self.inner.to_json()}

    def describe(self):
        return f"discrete({self.inner.describe()})"


def build_zd(dim, norm="linf"):
    return ZdSpace(dim, norm)


def build_free(rank):
    return FreeSpace(rank)


def build_discrete_shift():
    return DiscreteShiftSpace()


def build_finite_graph(n, edges):
    return FiniteGraphSpace(n, edges)


def build_scaled(inner, factor):
    return ScaledSpace(inner, factor)


def build_discrete_adapter(inner):
    return DiscreteAdapterSpace(inner)


def base_space(space):
    """Unwrap scaled/discrete adapters down to the underlying space."""
    while isinstance(space, (ScaledSpace, DiscreteAdapterSpace)):
        space = space.inner
    return space


def is_discrete(space):
    """True when the space carries the 0/1 discrete metric."""
    return isinstance(space, (DiscreteShiftSpace, DiscreteAdapterSpace))


def space_from_json(obj):
    """Build a space from its description dict."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InvalidInputError(f"space description must have a 'kind', got {obj!r}")
    kind = obj["kind"]
    if kind == "zd":
        return ZdSpace(obj.get("dim"), obj.get("norm", "linf"))
    if kind == "free":
        return FreeSpace(obj.get("rank"))
    if kind == "discrete_shift":
        return DiscreteShiftSpace()
    if kind == "finite_graph":
        return FiniteGraphSpace(obj.get("n"), obj.get("edges", []))
    if kind == "scaled":
        return ScaledSpace(space_from_json(obj.get("inner")), obj.get("factor"))
    if kind == "discrete":
        return DiscreteAdapterSpace(space_from_json(obj.get("inner")))
    raise InvalidInputError(f"unknown space kind {kind!r}")


def distance(space, p, q):
    """Exact distance between two points of the space."""
    space.check_point(p)
    space.check_point(q)
    return space.distance(p, q)


def set_distance(space, ps, qs):
    """min d(x, y) over x in ps, y in qs; INF when either side is empty."""
    best = INF
    for x in ps:
        for y in qs:
            d = space.distance(x, y)
            if d < best:
                best = d
                if best == 0:
                    return best
    return best


def in_open_ball(space, center, radius, x):
    """True iff d(center, x) < radius (strict, exact)."""
    if radius == INF or radius <= 0:
        raise InvalidInputError("radius must be a positive finite rational")
    return distance(space, center, x) < radius


def greedy_epsilon_net(space, points, eps):
    """Greedy net: scan ``points`` in order, keep each point not yet covered.

    The result N is a subset of the input in input order, and every input
    point lies strictly within eps of some kept point.  Net size is not
    minimized; determinism is the contract.
    """
    if eps <= 0:
        raise InvalidInputError("eps must be > 0")
    net = []
    for p in points:
        if not any(space.distance(p, n) < eps for n in net):
            net.append(p)
    return net


def require_distinct(points, what="point set"):
    """Raise unless all points are pairwise distinct (structural equality)."""
    seen = set()
    for p in points:
        if p in seen:
            raise InvalidInputError(f"duplicate point {p!r} in {what}")
        seen.add(p)


class MetricViolation:
    """One failed metric axiom, with the offending points."""

    def __init__(self, axiom, points, detail):
        self.axiom = axiom
        self.points = points
        self.detail = detail

    def __repr__(self):
        return f"MetricViolation({self.axiom}, {self.points}, {self.detail})"

    def to_json(self, space):
        return {
            "axiom": self.axiom,
            "points": [space.point_to_json(p) for p in self.points],
            "detail": self.detail,
        }


EXHAUSTIVE_LIMIT = 64


def validate_metric(space, triples=()):
    """Check metric axioms on the given triples; exhaustive on small spaces.

    Every (x, y, z) is checked for identity, positivity, symmetry, and the
    triangle inequality in all three arrangements.  When the space has a
    finite universe of at most 64 points, all of its triples are checked in
    addition to the sample.  Violations are returned, not raised.
    """
    violations = []
    checked_pairs = set()

    def check_pair(x, y):
        key = (x, y)
        if key in checked_pairs:
            return
        checked_pairs.add(key)
        dxy = space.distance(x, y)
        dyx = space.distance(y, x)
        if dxy != dyx:
            violations.append(MetricViolation("symmetry", (x, y), f"d={dxy} vs {dyx}"))
        if x == y:
            if dxy != 0:
                violations.append(MetricViolation("identity", (x, y), f"d(x,x)={dxy}"))
        elif dxy <= 0:
            violations.append(MetricViolation("positivity", (x, y), f"d={dxy}"))

    def check_triple(x, y, z):
        check_pair(x, y)
        check_pair(y, z)
        check_pair(x, z)
        dxy = space.distance(x, y)
        dyz = space.distance(y, z)
        dxz = space.distance(x, z)
        for a, b, c, da, db, dc in (
            (x, z, y, dxz, dxy, dyz),
            (x, y, z, dxy, dxz, dyz),
            (y, z, x, dyz, dxy, dxz),
        ):
            if da > db + dc:
                violations.append(
                    MetricViolation("triangle", (a, c, b), f"{da} > {db} + {dc}")
                )

    for x, y, z in triples:
        space.check_point(x)
        space.check_point(y)
        space.check_point(z)
        check_triple(x, y, z)

    universe = space.universe()
    if universe is not None and len(universe) <= EXHAUSTIVE_LIMIT:
        for x in universe:
            for y in universe:
                for z in universe:
                    check_triple(x, y, z)

    return violations
