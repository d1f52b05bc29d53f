"""Brute-force ground truth, seeded instances, and differential testing.

The oracle enumerates group words breadth-first, deduplicating by the image
of the whole weighted tuple rather than by word: two words moving every
point of P to the same places are interchangeable for separation purposes,
and on abelian actions this collapses an exponential word count to a
polynomial image count.  A certificate word of length <= L therefore
"appears in the valid set at bound L" exactly when its image tuple does.

Instance generation is driven by SplitMix64, a fixed 64-bit mixing
recurrence, so any instance is reproducible from its integer seed alone.
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .actions import (
    DEFAULT_BUDGET,
    GeneratedAction,
    LeftMultiplication,
    OrbitBudget,
    SearchStats,
    Shift,
    Translation,
    VertexPermutation,
)
from .errors import BudgetExhaustedError, InvalidInputError
from .rationals import INF, format_rational, is_inf, ratio_of
from .separation import certificate_to_json, check_certificate, separate_points
from .spaces import (
    DiscreteAdapterSpace,
    DiscreteShiftSpace,
    FiniteGraphSpace,
    FreeSpace,
    ScaledSpace,
    ZdSpace,
)
from .words import IDENTITY

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit generator (SplitMix64 mixing recurrence)."""

    def __init__(self, seed):
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise InvalidInputError("seed must be a nonnegative int")
        self.state = seed & _MASK64

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n):
        """Uniform-ish value in 0..n-1 (modulo bias is irrelevant at 64 bits)."""
        if n <= 0:
            raise InvalidInputError("below() needs a positive bound")
        return self.next_u64() % n

    def pick(self, seq):
        return seq[self.below(len(seq))]


@dataclass
class OracleVerdict:
    """Everything the exhaustive search learned at a given word-length bound."""

    valid_words: list  # BFS-first word per valid image tuple
    valid_images: dict  # image tuple -> that word
    best_word: tuple
    best_ratio: object
    explored: int

    def contains_word(self, action, weighted, word):
        """True iff the word's image tuple is among the valid images."""
        image = word_image(action, weighted, word)
        return image in self.valid_images


def word_image(action, weighted, word):
    return tuple(action.apply_word(word, p) for p, _ in weighted)


def brute_force_separate(action, weighted, q_points, max_word_length, stats=None):
    """Enumerate every image of P under words up to the bound; rate them all.

    BFS over image tuples with the same signed-generator order as the orbit
    search; each image carries the first word reaching it.  A tuple is valid
    when min over p of d(image_p, Q) / eps_p is at least 1/3 (vacuously INF
    when P is empty).  Returns all valid representatives, the best one, and
    the number of distinct images explored.
    """
    if not isinstance(max_word_length, int) or max_word_length < 0:
        raise InvalidInputError("max_word_length must be a nonnegative int")
    weighted = list(weighted)
    q_points = list(q_points)
    space = action.space

    def rate(image):
        ratio = INF
        for p, (_, eps) in zip(image, weighted):
            d = INF
            for y in q_points:
                dy = space.distance(p, y)
                if dy < d:
                    d = dy
            r = ratio_of(d, eps)
            if r < ratio:
                ratio = r
        return ratio

    start = tuple(p for p, _ in weighted)
    seen = {start: IDENTITY}
    queue = deque([(start, IDENTITY)])
    valid_images = {}
    best_word = IDENTITY
    best_ratio = rate(start)
    if is_inf(best_ratio) or 3 * best_ratio >= 1:
        valid_images[start] = IDENTITY
    signed = action.signed_order()
    while queue:
        node, w = queue.popleft()
        if len(w) >= max_word_length:
            continue
        for s in signed:
            nxt = tuple(action.step(s, p) for p in node)
            if nxt in seen:
                continue
            nw = (s,) + w
            seen[nxt] = nw
            queue.append((nxt, nw))
            ratio = rate(nxt)
            if is_inf(ratio) or 3 * ratio >= 1:
                valid_images[nxt] = nw
            if ratio > best_ratio:
                best_ratio = ratio
                best_word = nw
    if stats is not None:
        stats.points += len(seen)
    return OracleVerdict(
        valid_words=list(valid_images.values()),
        valid_images=valid_images,
        best_word=best_word,
        best_ratio=best_ratio,
        explored=len(seen),
    )


@dataclass(frozen=True)
class SizeCaps:
    """Size parameters for random instances, with documented hard caps."""

    p_max: int = 4
    q_max: int = 5
    coord_max: int = 32
    eps_max: int = 4
    word_max: int = 6
    c_max: int = 4
    d_max: int = 4
    delta_choices: tuple = (3, 6, 9)

    def __post_init__(self):
        limits = {
            "p_max": (self.p_max, 6),
            "q_max": (self.q_max, 10),
            "coord_max": (self.coord_max, 32),
            "eps_max": (self.eps_max, 8),
            "word_max": (self.word_max, 8),
            "c_max": (self.c_max, 6),
            "d_max": (self.d_max, 6),
        }
        for name, (value, cap) in limits.items():
            if not isinstance(value, int) or value < 1:
                raise InvalidInputError(f"{name} must be a positive int")
            if value > cap:
                raise InvalidInputError(f"{name}={value} exceeds the cap {cap}")
        for d in self.delta_choices:
            if not isinstance(d, int) or not 1 <= d <= 16:
                raise InvalidInputError("delta choices must be ints in 1..16")


DEFAULT_SIZES = SizeCaps()

INSTANCE_KINDS = ("zd2", "zd1", "free2", "shift", "compact1d", "c4")


@dataclass
class InstanceSpec:
    """A reproducible problem instance: action, sets, and budget."""

    kind: str
    seed: int
    space: object
    generators: list
    weighted_p: list = field(default_factory=list)  # [(point, eps)]
    q_points: list = field(default_factory=list)
    c_weighted: Optional[list] = None  # [(point, delta)] for compact instances
    d_points: Optional[list] = None
    budget: OrbitBudget = DEFAULT_BUDGET

    def action(self):
        return GeneratedAction(self.space, self.generators)

    def to_json(self):
        space = self.space
        out = {
            "kind": self.kind,
            "seed": self.seed,
            "space": space.to_json(),
            "generators": [g.to_json() for g in self.generators],
        }
        if self.c_weighted is None:
            out["P"] = [
                {"point": space.point_to_json(p), "eps": format_rational(e)}
                for p, e in self.weighted_p
            ]
            out["Q"] = [space.point_to_json(p) for p in self.q_points]
        else:
            out["C"] = [
                {"point": space.point_to_json(p), "delta": format_rational(d)}
                for p, d in self.c_weighted
            ]
            out["D"] = [space.point_to_json(p) for p in self.d_points]
        out["budget"] = self.budget.to_json()
        return out


def _distinct_points(count, sampler):
    points = []
    seen = set()
    while len(points) < count:
        p = sampler()
        if p not in seen:
            seen.add(p)
            points.append(p)
    return points


def _coord(rng, coord_max):
    return rng.below(2 * coord_max + 1) - coord_max


def _free_word(rng, rank, max_len):
    length = rng.below(max_len + 1)
    letters = [s for i in range(1, rank + 1) for s in (i, -i)]
    word = []
    for _ in range(length):
        options = [s for s in letters if not word or s != -word[-1]]
        word.append(rng.pick(options))
    return tuple(word)


def random_instance(kind, seed, sizes=None, budget=None):
    """Deterministically generate an instance from (kind, seed, sizes).

    The same arguments always yield a byte-identical instance.  Orbits of
    the generated actions are genuinely unbounded for every kind except
    "c4", the fixed negative control whose orbit is contained in Q.
    """
    sizes = sizes or DEFAULT_SIZES
    budget = budget or DEFAULT_BUDGET
    rng = SplitMix64(seed)
    if kind == "zd2" or kind == "zd1":
        dim = 2 if kind == "zd2" else 1
        space = ZdSpace(dim, "linf")
        gens = [
            Translation(tuple(1 if j == i else 0 for j in range(dim)))
            for i in range(dim)
        ]
        sampler = lambda: tuple(_coord(rng, sizes.coord_max) for _ in range(dim))
        p_points = _distinct_points(1 + rng.below(sizes.p_max), sampler)
        weighted = [(p, Fraction(1 + rng.below(sizes.eps_max))) for p in p_points]
        q_points = _distinct_points(1 + rng.below(sizes.q_max), sampler)
        return InstanceSpec(kind, seed, space, gens, weighted, q_points, budget=budget)
    if kind == "free2":
        space = FreeSpace(2)
        gens = [LeftMultiplication((1,)), LeftMultiplication((2,))]
        sampler = lambda: _free_word(rng, 2, sizes.word_max)
        p_points = _distinct_points(1 + rng.below(sizes.p_max), sampler)
        weighted = [(p, Fraction(1 + rng.below(sizes.eps_max))) for p in p_points]
        q_points = _distinct_points(1 + rng.below(sizes.q_max), sampler)
        return InstanceSpec(kind, seed, space, gens, weighted, q_points, budget=budget)
    if kind == "shift":
        space = DiscreteShiftSpace()
        gens = [Shift()]
        sampler = lambda: _coord(rng, sizes.coord_max)
        p_points = _distinct_points(1 + rng.below(sizes.p_max), sampler)
        weighted = [(p, Fraction(1)) for p in p_points]
        q_points = _distinct_points(1 + rng.below(sizes.q_max), sampler)
        return InstanceSpec(kind, seed, space, gens, weighted, q_points, budget=budget)
    if kind == "compact1d":
        space = ZdSpace(1, "linf")
        gens = [Translation((1,))]
        sampler = lambda: (_coord(rng, sizes.coord_max),)
        c_points = _distinct_points(1 + rng.below(sizes.c_max), sampler)
        c_weighted = [(c, Fraction(rng.pick(sizes.delta_choices))) for c in c_points]
        d_points = _distinct_points(1 + rng.below(sizes.d_max), sampler)
        if budget is DEFAULT_BUDGET:
            # The enlarged obstacle set roughly doubles its 1-D spread per
            # recursion level, so the last escape can sit far outside the
            # default word-length window.
            budget = OrbitBudget(100000, 768)
        return InstanceSpec(
            kind,
            seed,
            space,
            gens,
            c_weighted=c_weighted,
            d_points=d_points,
            budget=budget,
        )
    if kind == "c4":
        # Fixed negative control: a 4-cycle rotated into itself, Q everything.
        space = FiniteGraphSpace(
            4, [[0, 1, 1], [1, 2, 1], [2, 3, 1], [3, 0, 1]]
        )
        gens = [VertexPermutation((1, 2, 3, 0))]
        weighted = [(0, Fraction(1))]
        q_points = [0, 1, 2, 3]
        return InstanceSpec(kind, seed, space, gens, weighted, q_points, budget=budget)
    raise InvalidInputError(f"unknown instance kind {kind!r}; have {INSTANCE_KINDS}")


@dataclass
class DifferentialReport:
    """Outcome of one solver-vs-oracle comparison."""

    status: str  # "ok" | "mismatch" | "budget-exhausted"
    problems: list
    instance: InstanceSpec
    certificate: object = None
    verdict: Optional[OracleVerdict] = None
    explored: int = 0

    @property
    def mismatch(self):
        return self.status == "mismatch"

    def to_json(self):
        space = self.instance.space
        out = {
            "status": self.status,
            "problems": list(self.problems),
            "instance": self.instance.to_json(),
            "explored": self.explored,
        }
        if self.certificate is not None:
            out["certificate"] = certificate_to_json(space, self.certificate)
        if self.verdict is not None:
            out["oracle"] = {
                "best_word": list(self.verdict.best_word),
                "best_ratio": format_rational(self.verdict.best_ratio),
                "valid_count": len(self.verdict.valid_words),
                "explored": self.verdict.explored,
            }
        return out


def differential_check(instance, budget=None, oracle_bound=8, certificate=None):
    """Run the solver and the oracle on one instance and cross-check them.

    Asserts that (a) the certificate re-verifies by direct recomputation
    (including trace replay), (b) its ratio is at least 1/3, and (c) when the
    word is within the oracle bound, its image tuple is oracle-valid.  A
    stored certificate can be passed in to be checked instead of solving.
    """
    if instance.c_weighted is not None:
        raise InvalidInputError("differential_check expects a P/Q instance")
    action = instance.action()
    budget = budget or instance.budget
    stats = SearchStats()
    problems = []
    cert = certificate
    if cert is None:
        try:
            cert = separate_points(
                action, instance.weighted_p, instance.q_points, budget, stats
            )
        except BudgetExhaustedError as exc:
            return DifferentialReport(
                "budget-exhausted", [str(exc)], instance, explored=stats.points
            )
    problems.extend(
        check_certificate(action, instance.weighted_p, instance.q_points, cert)
    )
    if not is_inf(cert.ratio) and 3 * cert.ratio < 1:
        problems.append(f"certificate ratio {format_rational(cert.ratio)} below 1/3")
    verdict = brute_force_separate(
        action, instance.weighted_p, instance.q_points, oracle_bound
    )
    if len(cert.word) <= oracle_bound:
        try:
            oracle_valid = verdict.contains_word(action, instance.weighted_p, cert.word)
        except InvalidInputError as exc:
            oracle_valid = False
            problems.append(f"certificate word cannot be applied: {exc}")
        if not oracle_valid:
            problems.append(
                f"certificate word {list(cert.word)} (length {len(cert.word)}) "
                f"is not oracle-valid at bound {oracle_bound}"
            )
    status = "mismatch" if problems else "ok"
    return DifferentialReport(
        status, problems, instance, cert, verdict, explored=stats.points
    )


CSV_COLUMNS = (
    "kind",
    "seed",
    "p_size",
    "q_size",
    "cert_ratio",
    "oracle_best_ratio",
    "word_len",
    "explored",
    "status",
)


@dataclass
class ExperimentResult:
    csv_text: str
    rows: list
    min_ratio: object  # min certificate ratio over successful rows, or None


def ratio_experiment(
    kinds, n_instances, seed, budget=None, oracle_bound=8, sizes=None
):
    """Measure achieved ratios over seeded instances; emit a CSV table.

    Generates n_instances total, cycling through the given kinds, each from
    a fresh sub-seed of the master seed so any row is replayable on its own.
    Budget exhaustion becomes a row status, not a failure.  The aggregate
    minimum certificate ratio over successful rows is returned alongside the
    CSV text (it can only be None when no row succeeded).
    """
    if not isinstance(n_instances, int) or n_instances < 1:
        raise InvalidInputError("n_instances must be a positive int")
    kinds = list(kinds)
    if not kinds:
        raise InvalidInputError("at least one instance kind is required")
    master = SplitMix64(seed)
    rows = []
    min_ratio = None
    for i in range(n_instances):
        kind = kinds[i % len(kinds)]
        inst_seed = master.next_u64()
        instance = random_instance(kind, inst_seed, sizes, budget)
        action = instance.action()
        stats = SearchStats()
        row = {
            "kind": kind,
            "seed": str(inst_seed),
            "p_size": str(len(instance.weighted_p)),
            "q_size": str(len(instance.q_points)),
        }
        try:
            cert = separate_points(
                action, instance.weighted_p, instance.q_points, instance.budget, stats
            )
        except BudgetExhaustedError:
            cert = None
        verdict = brute_force_separate(
            action, instance.weighted_p, instance.q_points, oracle_bound
        )
        row["oracle_best_ratio"] = format_rational(verdict.best_ratio)
        row["explored"] = str(stats.points)
        if cert is None:
            row["cert_ratio"] = ""
            row["word_len"] = ""
            row["status"] = "budget-exhausted"
        else:
            row["cert_ratio"] = format_rational(cert.ratio)
            row["word_len"] = str(len(cert.word))
            row["status"] = "ok"
            if not is_inf(cert.ratio):
                if min_ratio is None or cert.ratio < min_ratio:
                    min_ratio = cert.ratio
        rows.append(row)
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(row[c] for c in CSV_COLUMNS))
    return ExperimentResult("\n".join(lines) + "\n", rows, min_ratio)


def sample_point(space, rng, coord_max=32, word_max=6):
    """Draw a deterministic pseudo-random point of any built-in space."""
    if isinstance(space, (ScaledSpace, DiscreteAdapterSpace)):
        return sample_point(space.inner, rng, coord_max, word_max)
    if isinstance(space, ZdSpace):
        return tuple(_coord(rng, coord_max) for _ in range(space.dim))
    if isinstance(space, FreeSpace):
        return _free_word(rng, space.rank, word_max)
    if isinstance(space, DiscreteShiftSpace):
        return _coord(rng, coord_max)
    if isinstance(space, FiniteGraphSpace):
        return rng.below(space.n)
    raise InvalidInputError(f"cannot sample points of {space.kind}")
