"""Counterexample measure spaces for operations without a linear bound.

If ``tau`` admits no bound ``|tau(v)| <= sum_{j<n} c |v_j|`` then for every
``n`` there is a point ``v^n`` with::

    |tau(v^n)| > 2^(n/p) * sum_{j<n} |v^n_j|

Giving atom ``A_n`` the weight ``1/|tau(v^n)|^p`` and letting ``f_i`` take the
value ``v^n_i`` on ``A_n`` yields p-integrable ``f_i`` (the tail of each
series is dominated by ``sum 2^-n``) while every atom contributes exactly 1
to the p-th power integral of ``tau(f)``. In finite mode the point must also
clear ``(1/b_n)^(1/p)`` with ``b_n = 2^-(n+1)``, which keeps the total
measure below 1.

Real powers ``2^(n/p)`` are replaced by rational upper bounds, which only
strengthens the inequality the construction needs.
"""

from __future__ import annotations

import enum
import functools
import random
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from gmpy2 import mpq

from .certify import BoundCertificate
from .evaluation import evaluate
from .exact import (
    ONE, ZERO, NonDyadicWeight, Rational, binary_exponents, format_rational, pow2, power_lower,
    power_upper, rational,
)
from .terms import Term, arity as term_arity


class Mode(enum.Enum):
    ARBITRARY = "A"
    FINITE = "F"


class NotFound(LookupError):
    def __init__(self, n: int, probes: int):
        super().__init__(f"no violating point for n={n} within {probes} probes (inconclusive)")
        self.n = n
        self.probes = probes


class WeightTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    directions: int = 8
    base: Rational = mpq(2)
    budget: int = 10_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "base", rational(self.base))
        if self.base <= 1:
            raise ValueError("magnitude ladder base must exceed 1")
        if self.budget < 1 or self.directions < 0:
            raise ValueError("budget must be positive and directions nonnegative")


@dataclass(frozen=True)
class WitnessConfig:
    p: Rational = ONE
    mode: Mode = Mode.ARBITRARY
    atoms: int = 10
    search: SearchConfig = field(default_factory=SearchConfig)

    def __post_init__(self):
        object.__setattr__(self, "p", rational(self.p))
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if self.atoms < 0:
            raise ValueError("atom count must be nonnegative")
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", Mode(self.mode))

    @property
    def integer_p(self) -> bool:
        return self.p.denominator == 1

    def b(self, n: int) -> Rational:
        """The finite-mode ceiling on the n-th atom's weight."""
        return pow2(-(n + 1))


@dataclass(frozen=True)
class WitnessPoint:
    n: int
    point: tuple
    value: Rational


@dataclass(frozen=True)
class ViolationWitness:
    points: tuple


@dataclass(frozen=True)
class DiscreteMeasureSpace:
    atoms: tuple  # of (label, weight)
    remainder: tuple = ("C", ZERO)

    def total(self) -> Rational:
        return sum((w for _, w in self.atoms), ZERO) + self.remainder[1]


class WitnessBuild(NamedTuple):
    space: DiscreteMeasureSpace
    tables: dict
    violation: ViolationWitness


# -- evaluable operations --------------------------------------------------------------


def _as_callable(f, arity: int | None):
    if isinstance(f, Term):
        return (lambda point: evaluate(f, point)), (term_arity(f) if arity is None else arity)
    if arity is None:
        raise ValueError("a callable operation needs an explicit arity")
    return (lambda point: rational(f(point))), arity


# -- thresholds ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=4096)
def _power_of_two_upper(exponent: Rational) -> Rational:
    return ONE if exponent == 0 else power_upper(2, exponent)


def growth_factor(n: int, p) -> Rational:
    """Rational upper bound on ``2^(n/p)`` (exact when the power is rational)."""
    return _power_of_two_upper(mpq(n) / rational(p))


def threshold(n: int, point: Sequence, cfg: WitnessConfig) -> Rational:
    """Right-hand side the value at ``point`` must strictly exceed."""
    head = sum((abs(point[j]) for j in range(min(n, len(point)))), ZERO)
    bound = growth_factor(n, cfg.p) * head
    if cfg.mode is Mode.FINITE:
        bound += _power_of_two_upper(mpq(n + 1) / cfg.p)
    return bound


# -- probe order --------------------------------------------------------------------------


def random_directions(count: int, arity: int, seed: int) -> list:
    rng = random.Random(seed)
    out = []
    while len(out) < count and arity:
        d = tuple(mpq(rng.randint(-10, 10), rng.randint(1, 10)) for _ in range(arity))
        if any(d):
            out.append(d)
    return out


def probe_points(arity: int, search: SearchConfig):
    """Deterministic probe sequence, at most ``search.budget`` points.

    Coordinate rays ``+-t e_i`` come first over the ladder ``t = base^s``;
    half of the budget is reserved for seeded random directions.
    """
    if arity == 0:
        yield ()
        return
    budget = search.budget
    directions = random_directions(search.directions, arity, search.seed)
    ray_budget = budget if not directions else budget - budget // 2
    used = 0
    s = 0
    while used < ray_budget:
        t = search.base**s
        for i in range(arity):
            for sign in (1, -1):
                if used >= ray_budget:
                    break
                v = [ZERO] * arity
                v[i] = sign * t
                used += 1
                yield tuple(v)
        s += 1
    s = 0
    while directions and used < budget:
        t = search.base**s
        for d in directions:
            if used >= budget:
                break
            used += 1
            yield tuple(t * c for c in d)
        s += 1


@functools.lru_cache(maxsize=32)
def _probe_list(arity: int, search: SearchConfig) -> tuple:
    return tuple(probe_points(arity, search))


def find_violation(f, n: int, cfg: WitnessConfig, arity: int | None = None) -> WitnessPoint | None:
    """First probe point violating the n-th inequality, or None when the budget runs out.

    None is inconclusive: the operation may satisfy a linear bound, or the
    violation may lie outside the probe set.
    """
    fn, m = _as_callable(f, arity)
    r = growth_factor(n, cfg.p)
    extra = _power_of_two_upper(mpq(n + 1) / cfg.p) if cfg.mode is Mode.FINITE else ZERO
    head = min(n, m)
    for point in _probe_list(m, cfg.search):
        value = fn(point)
        if abs(value) > r * sum(map(abs, point[:head]), ZERO) + extra:
            return WitnessPoint(n, point, value)
    return None


def defeat_certificate(f, cert: BoundCertificate, search: SearchConfig,
                       arity: int | None = None) -> tuple | None:
    """A probe point where ``|f| > k + sum lambda_j |v_j|``, if one is found."""
    fn, m = _as_callable(f, arity)
    for point in _probe_list(m, search):
        if abs(fn(point)) > cert.bound_at(point):
            return point
    return None


# -- construction -------------------------------------------------------------------------


def atom_weight(value: Rational, cfg: WitnessConfig) -> Rational:
    """``1/|value|^p``, or a rational lower bound within a factor 2 of it."""
    return 1 / power_upper(abs(value), cfg.p)


def build_witness(f, cfg: WitnessConfig, arity: int | None = None) -> WitnessBuild:
    fn, m = _as_callable(f, arity)
    points, atoms = [], []
    for n in range(cfg.atoms):
        wp = find_violation(fn, n, cfg, arity=m)
        if wp is None:
            raise NotFound(n, cfg.search.budget)
        # re-check exactly before the point is used
        if not abs(wp.value) > threshold(n, wp.point, cfg):
            raise AssertionError("probe returned a non-violating point")
        points.append(wp)
        atoms.append((f"A{n}", atom_weight(wp.value, cfg)))
    tables = {i: tuple(wp.point[i] for wp in points) for i in range(m)}
    return WitnessBuild(DiscreteMeasureSpace(tuple(atoms)), tables, ViolationWitness(tuple(points)))


# -- verification -------------------------------------------------------------------------

DIVERGES = "DIVERGES"
INCONCLUSIVE = "INCONCLUSIVE"
INVALID = "INVALID"


@dataclass(frozen=True)
class WitnessReport:
    source_sums: dict
    prefix_constants: dict
    tail_bounds: dict
    image_sum: Rational
    total_measure: Rational
    verdict: str
    exact: bool

    def lines(self) -> list:
        out = [f"image_sum={format_rational(self.image_sum)}",
               f"total_measure={format_rational(self.total_measure)}"]
        for i in sorted(self.source_sums):
            out.append(f"source {i} sum={format_rational(self.source_sums[i])} "
                       f"M={format_rational(self.prefix_constants[i])} "
                       f"bound={format_rational(self.tail_bounds[i])}")
        out.append(f"verdict={self.verdict}" + ("" if self.exact else " (rational enclosures)"))
        return out


def _pow_upper(x: Rational, cfg: WitnessConfig) -> Rational:
    return abs(x) ** int(cfg.p) if cfg.integer_p else power_upper(abs(x), cfg.p)


def _pow_lower(x: Rational, cfg: WitnessConfig) -> Rational:
    return abs(x) ** int(cfg.p) if cfg.integer_p else power_lower(abs(x), cfg.p)


def verify_witness(space: DiscreteMeasureSpace, tables: dict, f, cfg: WitnessConfig,
                   threshold_value=None, arity: int | None = None) -> WitnessReport:
    """Exact partial sums for the discrete witness.

    For every coordinate ``i`` the source sum ``sum_n |v^n_i|^p mu(A_n)`` is
    split into the prefix ``M_i`` (atoms n <= i) and a tail bounded by
    ``sum_{n>i, v^n_i != 0} 2^-n``; the verdict requires each source sum to
    be at most ``M_i + 2``.
    """
    weights = [w for _, w in space.atoms]
    count = len(weights)
    m = len(tables) if arity is None else arity
    points = [tuple(tables[i][n] for i in range(m)) for n in range(count)]
    fn, _ = _as_callable(f, m)

    image = ZERO
    for point, w in zip(points, weights):
        image += _pow_lower(fn(point), cfg) * w

    sources, prefixes, bounds = {}, {}, {}
    valid = True
    for i in range(m):
        total = prefix = ZERO
        tail_bound = ZERO
        for n, (point, w) in enumerate(zip(points, weights)):
            term = _pow_upper(point[i], cfg) * w
            total += term
            if n <= i:
                prefix += term
            elif point[i] != 0:
                tail_bound += pow2(-n)
        sources[i], prefixes[i], bounds[i] = total, prefix, prefix + tail_bound
        if total > prefix + 2:
            valid = False

    total_measure = space.total()
    if cfg.mode is Mode.FINITE and any(w >= cfg.b(n) for n, w in enumerate(weights)):
        valid = False

    threshold_value = rational(count if threshold_value is None else threshold_value)
    if not cfg.integer_p:
        # fractional p: each image term is only known to be at least 1/2
        threshold_value /= 2

    if not valid:
        verdict = INVALID
    elif count == 0 or image < threshold_value:
        verdict = INCONCLUSIVE
    else:
        verdict = DIVERGES
    return WitnessReport(sources, prefixes, bounds, image, total_measure, verdict, cfg.integer_p)


# -- witness file format ----------------------------------------------------------------


def format_witness(build: WitnessBuild, cfg: WitnessConfig) -> str:
    lines = [f"p={format_rational(cfg.p)} mode={cfg.mode.value} N={len(build.space.atoms)}"]
    for n, (_, w) in enumerate(build.space.atoms):
        lines.append(f"atom {n} weight {format_rational(w)}")
    for n in range(len(build.space.atoms)):
        for i in sorted(build.tables):
            lines.append(f"val {i} {n} {format_rational(build.tables[i][n])}")
    return "\n".join(lines) + "\n"


class WitnessFormatError(ValueError):
    pass


def parse_witness(text: str) -> tuple:
    """Inverse of :func:`format_witness`: ``(cfg, space, tables)``."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise WitnessFormatError("empty witness file")
    try:
        header = dict(item.split("=", 1) for item in rows[0])
        p, mode, count = rational(header["p"]), Mode(header["mode"]), int(header["N"])
    except (KeyError, ValueError) as exc:
        raise WitnessFormatError(f"bad header: {' '.join(rows[0])}") from exc
    weights: dict = {}
    values: dict = {}
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            if row[0] == "atom" and row[2] == "weight" and len(row) == 4:
                weights[int(row[1])] = rational(row[3])
            elif row[0] == "val" and len(row) == 4:
                values[(int(row[1]), int(row[2]))] = rational(row[3])
            else:
                raise ValueError
        except (IndexError, ValueError):
            raise WitnessFormatError(f"line {lineno}: cannot parse {' '.join(row)!r}") from None
    if sorted(weights) != list(range(count)):
        raise WitnessFormatError(f"expected atoms 0..{count - 1}")
    m = max((i for i, _ in values), default=-1) + 1
    tables = {}
    for i in range(m):
        try:
            tables[i] = tuple(values[(i, n)] for n in range(count))
        except KeyError as exc:
            raise WitnessFormatError(f"missing value for coordinate {exc.args[0]}") from None
    space = DiscreteMeasureSpace(tuple((f"A{n}", weights[n]) for n in range(count)))
    return WitnessConfig(p=p, mode=mode, atoms=count), space, tables


# -- partitionable discrete models --------------------------------------------------------


def partitionable_atoms(weights: Sequence) -> list:
    """Disjoint atom sets ``{(n, z) : z in K_n}`` of the omega x Z model.

    Atom ``(n, z)`` has measure ``2^z``; ``K_n`` is the exponent set of the
    binary expansion of ``a_n``, so the n-th set has measure exactly ``a_n``.
    """
    out = []
    for n, a in enumerate(weights):
        out.append([((n, z), pow2(z)) for z in binary_exponents(a)])
    return out


def conditionally_partitionable_atoms(weights: Sequence, normalized: bool = False) -> list:
    """Atom sets in the model on ``{(n, m) : m >= n}`` with ``nu({(n, m)}) = 2^-m``.

    The whole model has measure 4; ``normalized=True`` divides by 4 to get a
    probability space. ``a_n`` must be dyadic and strictly below
    ``2^-(n-1)`` (the total mass of row n, which finitely many atoms cannot
    reach).
    """
    scale = mpq(1, 4) if normalized else ONE
    out = []
    for n, a in enumerate(weights):
        a = rational(a)
        if a >= pow2(-(n - 1)):
            raise WeightTooLarge(
                f"a_{n} = {format_rational(a)} is not below 2^-{n - 1}")
        exps = binary_exponents(a)
        out.append([((n, -z), scale * pow2(z)) for z in exps])
    return out


def conditional_model_total(rows: int, normalized: bool = False) -> Rational:
    """Measure of rows ``n < rows`` of the ``{(n, m) : m >= n}`` model."""
    # row n carries sum_{m >= n} 2^-m = 2^-(n-1)
    total = sum((pow2(-(n - 1)) for n in range(rows)), ZERO)
    return total / 4 if normalized else total


__all__ = [
    "Mode", "NotFound", "WeightTooLarge", "NonDyadicWeight", "SearchConfig", "WitnessConfig",
    "WitnessPoint", "ViolationWitness", "DiscreteMeasureSpace", "WitnessBuild", "growth_factor",
    "threshold", "probe_points", "find_violation", "defeat_certificate", "atom_weight",
    "build_witness", "WitnessReport", "verify_witness", "DIVERGES", "INCONCLUSIVE", "INVALID",
    "format_witness", "parse_witness", "WitnessFormatError", "partitionable_atoms",
    "conditionally_partitionable_atoms", "conditional_model_total",
]
