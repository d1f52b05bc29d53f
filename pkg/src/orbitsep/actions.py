"""Generated isometry groups acting on metric spaces.

A group element is always an ``IsometryWord``: a reduced tuple of signed
1-based generator indices (``+i`` applies generator ``i``, ``-i`` its
inverse, the empty tuple is the identity).  Words are evaluated right to
left, so ``apply_word(compose(u, v), p) == apply_word(u, apply_word(v, p))``.

Orbit exploration is breadth-first and deterministic: signed generators are
tried in the order ``+1, -1, +2, -2, ...``, points are deduplicated by
structural equality, and each point is paired with the first word reaching
it.  Every search is bounded by an ``OrbitBudget``; running out of budget
(or exhausting a finite orbit) raises ``BudgetExhaustedError``.
"""

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExhaustedError, InvalidInputError
from .rationals import INF
from .spaces import (
    DiscreteShiftSpace,
    FiniteGraphSpace,
    FreeSpace,
    ZdSpace,
    base_space,
    word_from_string,
    word_to_string,
)
from .words import IDENTITY, compose, invert, reduce_word


class Translation:
    """Lattice translation by an integer vector."""

    kind = "translation"

    def __init__(self, v):
        v = tuple(v)
        for c in v:
            if not isinstance(c, int) or isinstance(c, bool):
                raise InvalidInputError(f"translation vector must be ints, got {v!r}")
        if not v:
            raise InvalidInputError("translation vector must be nonempty")
        self.v = v

    def forward(self, p):
        return tuple(a + b for a, b in zip(p, self.v))

    def backward(self, p):
        return tuple(a - b for a, b in zip(p, self.v))

    def to_json(self):
        return {"kind": "translation", "v": list(self.v)}

    def describe(self):
        return f"translation{self.v}"


class LeftMultiplication:
    """Left multiplication of free-group points by a fixed reduced word."""

    kind = "leftmul"

    def __init__(self, word):
        self.word = reduce_word(word)
        self._inverse = invert(self.word)

    def forward(self, p):
        return compose(self.word, p)

    def backward(self, p):
        return compose(self._inverse, p)

    def to_json(self):
        return {"kind": "leftmul", "w": word_to_string(self.word)}

    def describe(self):
        return f"leftmul({word_to_string(self.word) or '1'})"


class Shift:
    """The successor map on the integers."""

    kind = "shift"

    def forward(self, p):
        return p + 1

    def backward(self, p):
        return p - 1

    def to_json(self):
        return {"kind": "shift"}

    def describe(self):
        return "shift"


class VertexPermutation:
    """A permutation of graph vertices given in one-line notation."""

    kind = "perm"

    def __init__(self, perm):
        perm = tuple(perm)
        if sorted(perm) != list(range(len(perm))):
            raise InvalidInputError(f"not a permutation of 0..{len(perm) - 1}: {perm!r}")
        self.perm = perm
        inv = [0] * len(perm)
        for i, j in enumerate(perm):
            inv[j] = i
        self._inv = tuple(inv)

    def forward(self, p):
        return self.perm[p]

    def backward(self, p):
        return self._inv[p]

    def to_json(self):
        return {"kind": "perm", "p": list(self.perm)}

    def describe(self):
        return f"perm{self.perm}"


def generator_from_json(obj):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InvalidInputError(f"generator description must have a 'kind', got {obj!r}")
    kind = obj["kind"]
    if kind == "translation":
        return Translation(obj.get("v", ()))
    if kind == "leftmul":
        w = obj.get("w", "")
        return LeftMultiplication(word_from_string(w) if isinstance(w, str) else w)
    if kind == "shift":
        return Shift()
    if kind == "perm":
        return VertexPermutation(obj.get("p", ()))
    raise InvalidInputError(f"unknown generator kind {kind!r}")


_COMPATIBLE = {
    ZdSpace: Translation,
    FreeSpace: LeftMultiplication,
    DiscreteShiftSpace: Shift,
    FiniteGraphSpace: VertexPermutation,
}


class GeneratedAction:
    """A metric space together with a finite generator list.

    Only forward/backward maps are stored; the group itself is the set of
    words over the generators.  Generator-space compatibility is validated
    structurally here; whether each generator actually preserves distances is
    checked by :func:`verify_isometry`.
    """

    def __init__(self, space, generators):
        generators = list(generators)
        if not generators:
            raise InvalidInputError("generator list must be nonempty")
        base = base_space(space)
        expected = _COMPATIBLE.get(type(base))
        if expected is None:
            raise InvalidInputError(f"no generators defined for {base.kind} spaces")
        for gen in generators:
            if not isinstance(gen, expected):
                raise InvalidInputError(
                    f"{gen.describe()} cannot act on a {base.kind} space"
                )
            if isinstance(gen, Translation) and len(gen.v) != base.dim:
                raise InvalidInputError(
                    f"translation dimension {len(gen.v)} != space dimension {base.dim}"
                )
            if isinstance(gen, LeftMultiplication):
                for s in gen.word:
                    if abs(s) > base.rank:
                        raise InvalidInputError(
                            f"leftmul word uses letter {s} beyond rank {base.rank}"
                        )
            if isinstance(gen, VertexPermutation) and len(gen.perm) != base.n:
                raise InvalidInputError(
                    f"permutation on {len(gen.perm)} points != {base.n} vertices"
                )
        self.space = space
        self.generators = generators
        self._signed = []
        for i in range(1, len(generators) + 1):
            self._signed.append(i)
            self._signed.append(-i)

    def signed_order(self):
        """Signed generator indices in expansion order: +1, -1, +2, -2, ..."""
        return list(self._signed)

    def step(self, s, p):
        """Apply one signed generator to a point."""
        i = abs(s)
        if s == 0 or i > len(self.generators):
            raise InvalidInputError(f"generator index {s} out of range")
        gen = self.generators[i - 1]
        return gen.forward(p) if s > 0 else gen.backward(p)

    def apply_word(self, w, p):
        """Apply a word to a point, rightmost letter first."""
        for s in reversed(w):
            p = self.step(s, p)
        return p

    def generators_to_json(self):
        return [g.to_json() for g in self.generators]


def apply_word(action, w, p):
    return action.apply_word(w, p)


@dataclass(frozen=True)
class OrbitBudget:
    """Caps on orbit exploration: distinct points and word length."""

    max_points: int = 100000
    max_word_length: int = 24

    def __post_init__(self):
        if not isinstance(self.max_points, int) or self.max_points < 1:
            raise InvalidInputError("max_points must be a positive int")
        if not isinstance(self.max_word_length, int) or self.max_word_length < 1:
            raise InvalidInputError("max_word_length must be a positive int")

    def to_json(self):
        return {"max_points": self.max_points, "max_word_length": self.max_word_length}


DEFAULT_BUDGET = OrbitBudget()


@dataclass
class SearchStats:
    """Mutable counter threaded through searches for reporting."""

    points: int = 0


def orbit_stream(action, p, budget=DEFAULT_BUDGET, stats=None):
    """Yield (point, word) over the orbit of p in deterministic BFS order.

    Points come out in non-decreasing word length, without duplicates, each
    with the first word reaching it; the stream starts at (p, identity) and
    stops when the budget is hit or the orbit closes.  Extending a visited
    point's word by one signed letter never needs re-reduction: a seam
    cancellation would reproduce the parent's word, whose endpoint is
    already visited.
    """
    action.space.check_point(p)
    seen = {p}
    count = 1
    if stats is not None:
        stats.points += 1
    yield p, IDENTITY
    queue = deque([(p, IDENTITY)])
    maxlen = budget.max_word_length
    signed = action._signed
    while queue:
        x, w = queue.popleft()
        if len(w) >= maxlen:
            continue
        for s in signed:
            y = action.step(s, x)
            if y in seen:
                continue
            if count >= budget.max_points:
                return
            nw = (s,) + w
            seen.add(y)
            count += 1
            if stats is not None:
                stats.points += 1
            yield y, nw
            queue.append((y, nw))


def find_escape(action, p, q_points, eps, budget=DEFAULT_BUDGET, stats=None):
    """First word a (in BFS order) with d(a.p, y) >= eps for every y in Q.

    Equivalently: the first orbit point outside every open eps-ball around Q.
    Exhausting the budget (or the whole orbit) raises BudgetExhaustedError
    carrying the explored-point count.
    """
    if eps == INF or eps <= 0:
        raise InvalidInputError("eps must be a positive finite rational")
    space = action.space
    ef = Fraction(eps)
    en, ed = ef.numerator, ef.denominator
    explored = 0
    # Consecutive BFS points are near each other, so the Q-point that ruled
    # out the previous candidate usually rules out the next one too; testing
    # it first cannot change the outcome of the all-clear conjunction.
    last_violator = None
    for x, w in orbit_stream(action, p, budget, stats):
        explored += 1
        if last_violator is not None and space.distance(x, last_violator) * ed < en:
            continue
        ok = True
        for y in q_points:
            if space.distance(x, y) * ed < en:
                ok = False
                last_violator = y
                break
        if ok:
            return w
    raise BudgetExhaustedError(
        f"no escape at radius {eps} after exploring {explored} orbit points",
        explored=explored,
    )


def separated_family(action, p, eps, n, budget=DEFAULT_BUDGET, stats=None):
    """Greedily collect n orbit points pairwise >= 2*eps apart, with words.

    Each open eps-ball contains at most one such point, so a successful
    family certifies that no eps-net of the orbit has fewer than n points.
    """
    if eps == INF or eps <= 0:
        raise InvalidInputError("eps must be a positive finite rational")
    if not isinstance(n, int) or n < 1:
        raise InvalidInputError("n must be a positive int")
    space = action.space
    two_eps = 2 * Fraction(eps)
    kept = []
    explored = 0
    for x, w in orbit_stream(action, p, budget, stats):
        explored += 1
        if all(space.distance(x, k) >= two_eps for k, _ in kept):
            kept.append((x, w))
            if len(kept) == n:
                return kept
    raise BudgetExhaustedError(
        f"found only {len(kept)} of {n} separated orbit points "
        f"after exploring {explored}",
        explored=explored,
    )


def max_step_displacement(action, p):
    """max over signed generators s of d(p, s.p).

    Since generators are isometries, d(p, w.p) <= len(w) * this value; orbit
    searches use it to discard targets that no in-budget word can approach.
    """
    space = action.space
    return max(space.distance(p, action.step(s, p)) for s in action._signed)


class IsometryViolation:
    """One generator failure: either a moved distance or a bad inverse."""

    def __init__(self, kind, generator_index, points, detail):
        self.kind = kind
        self.generator_index = generator_index
        self.points = points
        self.detail = detail

    def __repr__(self):
        return (
            f"IsometryViolation({self.kind}, gen={self.generator_index}, "
            f"{self.points}, {self.detail})"
        )

    def to_json(self, space):
        return {
            "kind": self.kind,
            "generator": self.generator_index,
            "points": [space.point_to_json(p) for p in self.points],
            "detail": self.detail,
        }


def verify_isometry(action, pairs=()):
    """Check d(s.x, s.y) == d(x, y) for every signed generator on each pair.

    Also checks that backward really inverts forward on the sampled points.
    Exhaustive over all vertex pairs when the space is finite with at most
    64 points.  Violations are returned, not raised.
    """
    space = action.space
    violations = []

    def check_pair(x, y):
        dxy = space.distance(x, y)
        for s in action._signed:
            moved = space.distance(action.step(s, x), action.step(s, y))
            if moved != dxy:
                violations.append(
                    IsometryViolation(
                        "distance", s, (x, y), f"d={dxy} moved to {moved}"
                    )
                )
        for i in range(1, len(action.generators) + 1):
            if action.step(-i, action.step(i, x)) != x:
                violations.append(
                    IsometryViolation("inverse", i, (x,), "backward(forward(x)) != x")
                )

    for x, y in pairs:
        space.check_point(x)
        space.check_point(y)
        check_pair(x, y)

    universe = space.universe()
    if universe is not None and len(universe) <= 64:
        for x in universe:
            for y in universe:
                check_pair(x, y)

    return violations
