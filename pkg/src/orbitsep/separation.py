"""Constructive separation of finite point sets under an isometric action.

``separate_points`` finds a group word ``g`` with ``d(g.p, Q) >= eps_p / 3``
for every weighted point ``p``, by recursion on ``P``:

* pick a pivot ``p`` (largest ``eps_p``, ties by input order);
* find an escape word ``a`` moving ``p`` at least ``eps_p`` away from all
  of ``Q`` (possible whenever the orbit of ``p`` has no finite
  ``eps_p``-net, budget permitting);
* detect the subset ``Q0`` of ``Q`` whose ``eps_p/3``-balls meet the orbit
  of ``p``, recording a witness word ``g_y`` per member (the detection is a
  bounded orbit scan, so it may miss members — see below);
* recurse on the remaining points (moved by ``a``, keeping their weights)
  against ``Q' = Q ∪ ⋃_y (g_y ∘ a^-1).Q``, obtaining ``h``;
* if ``h.a.p`` clears ``Q`` by ``eps_p/3``, answer ``g = h ∘ a``; otherwise
  the violating ``y`` is a genuine ``Q0`` member.  If its witness was
  already recorded, the composite ``g = a ∘ g_y^-1 ∘ h ∘ a`` is provably
  clear for every point; if not, ``h ∘ a`` itself is a fresh witness for
  ``y``, so record it and redo this level.  Each redo strictly enlarges
  ``Q0 ⊆ Q``, so a level restarts at most ``|Q|`` times.

Every certificate carries the per-point achieved distances and the full
recursion trace, and is re-checked exactly before being returned.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .actions import (
    DEFAULT_BUDGET,
    find_escape,
    max_step_displacement,
    orbit_stream,
)
from .errors import BudgetExhaustedError, InvalidInputError, TraceReplayError
from .rationals import INF, format_rational, is_inf, parse_rational, ratio_of
from .spaces import greedy_epsilon_net, is_discrete, require_distinct
from .words import IDENTITY, compose, invert


@dataclass
class LevelTrace:
    """One recursion level: the choices that determine the certificate."""

    pivot: object
    eps: object
    escape: tuple
    q0: list  # [(y, witness_word)], in the order used to enlarge Q
    restarts: int
    case: str  # "direct" or "fallback"
    fallback_y: object
    child: Optional["LevelTrace"]

    def levels(self):
        node = self
        while node is not None:
            yield node
            node = node.child


@dataclass
class SeparationCertificate:
    """A separating word plus exact evidence that it works."""

    word: tuple
    achieved: list  # [(point, distance to Q of the moved point)]
    ratio: object  # min achieved(p) / eps_p, INF for empty P
    trace: Optional[LevelTrace]


def _check_weighted(action, weighted, what="P"):
    for p, eps in weighted:
        action.space.check_point(p)
        if eps == INF or eps <= 0:
            raise InvalidInputError(f"weight for {p!r} must be a positive rational")
    require_distinct([p for p, _ in weighted], what)


def _check_points(action, points, what="Q"):
    for p in points:
        action.space.check_point(p)
    require_distinct(points, what)


def _detect_q0(action, pivot, q_points, radius, budget, stats=None):
    """Bounded detection of Q-points whose radius-ball meets the pivot orbit.

    Scans the budgeted orbit once, returning the first witness word per
    detected point, keyed in Q order.  Points provably out of reach (further
    than radius + max_word_length * max step displacement) are skipped up
    front.  Missing a true member here is sound: the caller repairs it by
    restarting with the witness it stumbled on.
    """
    found = {}
    if not q_points:
        return found
    space = action.space
    rf = Fraction(radius)
    rn, rd = rf.numerator, rf.denominator
    horizon = rf + budget.max_word_length * max_step_displacement(action, pivot)
    remaining = [y for y in q_points if space.distance(pivot, y) < horizon]
    if not remaining:
        return found
    for x, w in orbit_stream(action, pivot, budget, stats):
        still = []
        for y in remaining:
            if space.distance(x, y) * rd < rn:
                found[y] = w
            else:
                still.append(y)
        remaining = still
        if not remaining:
            break
    return {y: found[y] for y in q_points if y in found}


def _enlarge(action, q_points, q0, a):
    """Q' = Q plus the (g_y ∘ a^-1)-images of Q, deduplicated in order."""
    seen = dict.fromkeys(q_points)
    a_inv = invert(a)
    for _, g_y in q0.items():
        shift = compose(g_y, a_inv)
        for q in q_points:
            seen.setdefault(action.apply_word(shift, q))
    return list(seen)


def _separate(action, weighted, q_points, budget, stats):
    if not weighted:
        return IDENTITY, None
    best = 0
    for i in range(1, len(weighted)):
        if weighted[i][1] > weighted[best][1]:
            best = i
    pivot, eps = weighted[best]
    rest = weighted[:best] + weighted[best + 1 :]
    eps3 = Fraction(eps) / 3
    e3n, e3d = eps3.numerator, eps3.denominator
    space = action.space

    try:
        a = find_escape(action, pivot, q_points, eps, budget, stats)
    except BudgetExhaustedError as exc:
        exc.partial_levels.append({"pivot": pivot, "eps": eps, "stage": "escape"})
        raise
    moved = [(action.apply_word(a, x), ex) for x, ex in rest]
    # With nothing left to recurse on, h is the identity and the direct case
    # below always fires (the escape already clears Q by eps, not just eps/3),
    # so the detection scan would be dead weight.
    q0 = _detect_q0(action, pivot, q_points, eps3, budget, stats) if moved else {}

    restarts = 0
    while True:
        enlarged = _enlarge(action, q_points, q0, a)
        try:
            h, child = _separate(action, moved, enlarged, budget, stats)
        except BudgetExhaustedError as exc:
            exc.partial_levels.append(
                {
                    "pivot": pivot,
                    "eps": eps,
                    "stage": "recursion",
                    "escape": a,
                    "restarts": restarts,
                }
            )
            raise
        ha = compose(h, a)
        image = action.apply_word(ha, pivot)
        violating = None
        for y in q_points:
            if space.distance(image, y) * e3d < e3n:
                violating = y
                break
        if violating is None:
            trace = LevelTrace(
                pivot, eps, a, list(q0.items()), restarts, "direct", None, child
            )
            return ha, trace
        witness = q0.get(violating)
        if witness is not None:
            g = compose(a, compose(invert(witness), ha))
            trace = LevelTrace(
                pivot, eps, a, list(q0.items()), restarts, "fallback", violating, child
            )
            return g, trace
        # The failing image point itself lies within eps/3 of `violating`, so
        # h ∘ a is a witness the bounded detection missed; redo this level.
        q0[violating] = ha
        restarts += 1
        if restarts > len(q_points):
            raise AssertionError("restart bound exceeded; recursion is broken")


def evaluate_word(action, weighted, q_points, word):
    """Per-point distances d(word.p, Q) and the worst achieved/eps ratio."""
    space = action.space
    achieved = []
    ratio = INF
    for p, eps in weighted:
        img = action.apply_word(word, p)
        d = INF
        for y in q_points:
            dy = space.distance(img, y)
            if dy < d:
                d = dy
        achieved.append((p, d))
        r = ratio_of(d, eps)
        if r < ratio:
            ratio = r
    return achieved, ratio


def separate_points(action, weighted, q_points, budget=None, stats=None):
    """Find g with d(g.p, Q) >= eps_p / 3 for every (p, eps_p) in P.

    Returns a SeparationCertificate whose word, per-point achieved distances,
    worst ratio (>= 1/3), and recursion trace have all been recomputed and
    checked exactly.  Raises BudgetExhaustedError when some escape search ran
    out of budget (which is "unknown", not a refutation), and
    InvalidInputError on malformed weights or duplicate points.
    """
    budget = budget or DEFAULT_BUDGET
    weighted = list(weighted)
    q_points = list(q_points)
    _check_weighted(action, weighted)
    _check_points(action, q_points)
    word, trace = _separate(action, weighted, q_points, budget, stats)
    achieved, ratio = evaluate_word(action, weighted, q_points, word)
    for (_, eps), (_, d) in zip(weighted, achieved):
        if not is_inf(d) and 3 * d < eps:
            raise AssertionError("separation postcondition failed")
    return SeparationCertificate(word, achieved, ratio, trace)


def separate_discrete(action, points, q_points, budget=None, stats=None):
    """Discrete-metric specialization: find g with (g.P) ∩ Q = ∅.

    Runs separate_points with unit weights; discrete distances of at least
    1/3 are exactly 1, so a certificate moves P entirely off Q.
    """
    if not is_discrete(action.space):
        raise InvalidInputError(
            "separate_discrete needs a discrete metric (native or adapter)"
        )
    points = list(points)
    weighted = [(p, Fraction(1)) for p in points]
    cert = separate_points(action, weighted, q_points, budget, stats)
    images = {action.apply_word(cert.word, p) for p in points}
    if images & set(q_points):
        raise AssertionError("discrete separation left an intersection")
    return cert


@dataclass
class CompactSeparationResult:
    """The uniform-radius separation data derived for a finite C and D."""

    epsilon: Fraction
    net_a: list  # [(point, delta)] — the variable-radius cover of C
    net_p: list  # [(point, 9 * epsilon)] — the net actually separated
    net_q: list
    certificate: SeparationCertificate


def separate_compact(action, c_weighted, d_points, budget=None, stats=None):
    """Separate all of C from all of D at a radius derived from C alone.

    Each point of C carries a delta such that its orbit has no finite
    delta-net.  A greedy scan of C picks a cover A (a point joins A unless it
    already lies within half the delta of an earlier member); the working
    radius is epsilon = min(delta_a for a in A) / 18.  C and D are replaced
    by greedy epsilon-nets, the net of C is separated from the net of D at
    9*epsilon-weights (so the inner certificate clears 3*epsilon), and the
    final inequality d(g.C, D) >= epsilon is verified exactly.
    """
    budget = budget or DEFAULT_BUDGET
    c_weighted = list(c_weighted)
    d_points = list(d_points)
    if not c_weighted:
        raise InvalidInputError("C must be nonempty")
    _check_weighted(action, c_weighted, "C")
    _check_points(action, d_points, "D")
    space = action.space

    cover = []
    for c, delta in c_weighted:
        if not any(space.distance(c, a) < Fraction(da) / 2 for a, da in cover):
            cover.append((c, delta))
    epsilon = Fraction(1, 18) * min(Fraction(d) for _, d in cover)

    c_points = [c for c, _ in c_weighted]
    net_p = [(p, 9 * epsilon) for p in greedy_epsilon_net(space, c_points, epsilon)]
    net_q = greedy_epsilon_net(space, d_points, epsilon)
    cert = separate_points(action, net_p, net_q, budget, stats)

    for c in c_points:
        img = action.apply_word(cert.word, c)
        for y in d_points:
            if space.distance(img, y) < epsilon:
                raise AssertionError("compact separation postcondition failed")
    return CompactSeparationResult(epsilon, cover, net_p, net_q, cert)


def separated_sequence(action, tuple_points, eps, n, budget=None, stats=None):
    """Words w_1..w_n placing copies of a tuple pairwise >= eps apart.

    w_1 is the identity; each later w_k separates a fresh copy of the tuple
    (weighted 3*eps, so the certificate clears eps) from every coordinate
    already placed.  Cross-copy coordinate distances are >= eps exactly, and
    every copy is reproducible as w_k applied to the input tuple.
    """
    if eps == INF or eps <= 0:
        raise InvalidInputError("eps must be a positive finite rational")
    if not isinstance(n, int) or n < 1:
        raise InvalidInputError("n must be a positive int")
    tuple_points = list(tuple_points)
    _check_points(action, tuple_points, "tuple")
    three = 3 * Fraction(eps)
    if is_discrete(action.space):
        # 0/1 metrics cap all distances at 1, so "eps apart" means disjoint
        # and a unit weight already certifies it; larger weights would demand
        # an escape no discrete orbit can provide.
        if Fraction(eps) > 1:
            raise InvalidInputError(
                "no two points of a discrete metric space are more than 1 apart"
            )
        three = min(three, Fraction(1))
    words = [IDENTITY]
    placed = dict.fromkeys(tuple_points)
    for _ in range(1, n):
        weighted = [(t, three) for t in tuple_points]
        cert = separate_points(action, weighted, list(placed), budget, stats)
        words.append(cert.word)
        for t in tuple_points:
            placed.setdefault(action.apply_word(cert.word, t))
    return words


def full_existence_step(action, anchors, obstacles, budget=None, stats=None):
    """Move the obstacles off the anchors, then pull the anchors back.

    Runs separate_points with P = obstacles and Q = anchors, returning the
    certificate word sigma and realization = sigma^-1 . anchors.  Since sigma
    is an isometry, d(b, r) = d(sigma.b, anchor) >= eps_b / 3 for every
    obstacle b and realization point r.
    """
    anchors = list(anchors)
    obstacles = list(obstacles)
    cert = separate_points(action, obstacles, anchors, budget, stats)
    sigma = cert.word
    sigma_inv = invert(sigma)
    realization = [action.apply_word(sigma_inv, q) for q in anchors]
    for b, eps in obstacles:
        for r in realization:
            if 3 * action.space.distance(b, r) < eps:
                raise AssertionError("full-existence transfer failed")
    return sigma, realization


def replay_trace(action, weighted, q_points, trace, audit=None):
    """Rebuild the certificate word from a recorded trace, checking each step.

    Verifies per level that the recorded escape clears Q, that every recorded
    witness lands within eps/3 of its Q-point, and that the recorded case
    matches what the recomputed data forces.  Returns the reproduced word;
    raises TraceReplayError on any inconsistency.  When ``audit`` is a list,
    appends {"restarts", "q_size"} per level for bound checking.
    """
    weighted = list(weighted)
    q_points = list(q_points)
    if not weighted:
        if trace is not None:
            raise TraceReplayError("trace has a level for an empty point set")
        return IDENTITY
    if trace is None:
        raise TraceReplayError("trace is missing a recursion level")
    if audit is not None:
        audit.append({"restarts": trace.restarts, "q_size": len(q_points)})
    space = action.space
    matches = [
        i for i, (p, e) in enumerate(weighted) if p == trace.pivot and e == trace.eps
    ]
    if not matches:
        raise TraceReplayError(f"recorded pivot {trace.pivot!r} not in point set")
    idx = matches[0]
    pivot, eps = weighted[idx]
    rest = weighted[:idx] + weighted[idx + 1 :]
    eps3 = Fraction(eps) / 3

    a = trace.escape
    escaped = action.apply_word(a, pivot)
    for y in q_points:
        if space.distance(escaped, y) < eps:
            raise TraceReplayError("recorded escape word does not escape Q")

    q_set = set(q_points)
    q0 = {}
    for y, g_y in trace.q0:
        if y not in q_set:
            raise TraceReplayError(f"recorded Q0 member {y!r} is not in Q")
        if space.distance(action.apply_word(g_y, pivot), y) >= eps3:
            raise TraceReplayError(f"recorded witness for {y!r} is not within eps/3")
        q0[y] = g_y

    enlarged = _enlarge(action, q_points, q0, a)
    moved = [(action.apply_word(a, x), ex) for x, ex in rest]
    h = replay_trace(action, moved, enlarged, trace.child, audit)
    ha = compose(h, a)
    image = action.apply_word(ha, pivot)

    if trace.case == "direct":
        for y in q_points:
            if space.distance(image, y) < eps3:
                raise TraceReplayError("direct case recorded but pivot lands near Q")
        return ha
    if trace.case == "fallback":
        y = trace.fallback_y
        if y not in q0:
            raise TraceReplayError("fallback member has no recorded witness")
        if space.distance(image, y) >= eps3:
            raise TraceReplayError("fallback case recorded but no violation at y")
        return compose(a, compose(invert(q0[y]), ha))
    raise TraceReplayError(f"unknown trace case {trace.case!r}")


def check_certificate(action, weighted, q_points, cert):
    """Re-verify a certificate; returns a list of problems (empty if valid).

    Recomputes every distance from the word alone and compares exactly with
    the stored values; when a trace is present, replays it and requires the
    same word.
    """
    problems = []
    weighted = list(weighted)
    q_points = list(q_points)
    try:
        achieved, ratio = evaluate_word(action, weighted, q_points, cert.word)
    except InvalidInputError as exc:
        return [f"certificate word cannot be applied: {exc}"]
    stored = {p: d for p, d in cert.achieved}
    for p, d in achieved:
        if p not in stored:
            problems.append(f"stored achieved list is missing point {p!r}")
        elif stored[p] != d:
            problems.append(
                f"achieved distance for {p!r}: stored {format_rational(stored[p])}, "
                f"recomputed {format_rational(d)}"
            )
    if len(cert.achieved) != len(achieved):
        problems.append("stored achieved list has extra entries")
    if cert.ratio != ratio:
        problems.append(
            f"ratio mismatch: stored {format_rational(cert.ratio)}, "
            f"recomputed {format_rational(ratio)}"
        )
    if not is_inf(ratio) and 3 * ratio < 1:
        problems.append(f"ratio {format_rational(ratio)} is below 1/3")
    for (_, eps), (_, d) in zip(weighted, achieved):
        if not is_inf(d) and 3 * d < eps:
            problems.append("a moved point lands within eps/3 of Q")
    if cert.trace is not None:
        try:
            replayed = replay_trace(action, weighted, q_points, cert.trace)
            if replayed != cert.word:
                problems.append("trace replay produced a different word")
        except TraceReplayError as exc:
            problems.append(f"trace replay failed: {exc}")
    return problems


def trace_to_json(space, trace):
    if trace is None:
        return None
    return {
        "pivot": space.point_to_json(trace.pivot),
        "eps": format_rational(trace.eps),
        "escape": list(trace.escape),
        "q0": [
            {"y": space.point_to_json(y), "witness": list(w)} for y, w in trace.q0
        ],
        "restarts": trace.restarts,
        "case": trace.case,
        "fallback_y": None
        if trace.fallback_y is None
        else space.point_to_json(trace.fallback_y),
        "child": trace_to_json(space, trace.child),
    }


def trace_from_json(space, obj):
    if obj is None:
        return None
    try:
        return LevelTrace(
            pivot=space.point_from_json(obj["pivot"]),
            eps=parse_rational(obj["eps"]),
            escape=_word_from_json(obj["escape"]),
            q0=[
                (space.point_from_json(e["y"]), _word_from_json(e["witness"]))
                for e in obj["q0"]
            ],
            restarts=obj["restarts"],
            case=obj["case"],
            fallback_y=None
            if obj.get("fallback_y") is None
            else space.point_from_json(obj["fallback_y"]),
            child=trace_from_json(space, obj.get("child")),
        )
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed trace object: {exc}") from exc


def certificate_to_json(space, cert, include_trace=True):
    out = {
        "status": "ok",
        "word": list(cert.word),
        "achieved": [
            [space.point_to_json(p), format_rational(d)] for p, d in cert.achieved
        ],
        "ratio": format_rational(cert.ratio),
    }
    if include_trace:
        out["trace"] = trace_to_json(space, cert.trace)
    return out


def _word_from_json(obj):
    word = tuple(obj)
    for s in word:
        if not isinstance(s, int) or isinstance(s, bool) or s == 0:
            raise InvalidInputError(f"bad word letter {s!r}")
    return word


def certificate_from_json(space, obj):
    try:
        return SeparationCertificate(
            word=_word_from_json(obj["word"]),
            achieved=[
                (space.point_from_json(p), parse_rational(d))
                for p, d in obj["achieved"]
            ],
            ratio=parse_rational(obj["ratio"]),
            trace=trace_from_json(space, obj.get("trace")),
        )
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed certificate object: {exc}") from exc


def compact_result_to_json(space, result, include_trace=True):
    return {
        "status": "ok",
        "epsilon": format_rational(result.epsilon),
        "net_a": [
            {"point": space.point_to_json(p), "delta": format_rational(d)}
            for p, d in result.net_a
        ],
        "net_p": [
            {"point": space.point_to_json(p), "eps": format_rational(e)}
            for p, e in result.net_p
        ],
        "net_q": [space.point_to_json(p) for p in result.net_q],
        "certificate": certificate_to_json(space, result.certificate, include_trace),
    }
