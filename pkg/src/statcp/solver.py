"""Finite-domain constraint solver kernel.

Variables are dense integer handles into a :class:`Model`. Each variable owns
an immutable :class:`Domain`; narrowing replaces the domain and pushes the old
one on an undo trail so that search can restore state exactly.
"""

from __future__ import annotations

import bisect
import enum
import logging
import random
import time
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

__all__ = [
    "Domain",
    "Inconsistency",
    "LimitExceeded",
    "Model",
    "Propagator",
    "SearchConfig",
    "SearchStats",
    "Solution",
    "Status",
    "enumerate_solutions",
    "propagate_fixpoint",
    "iter_solutions",
    "solve",
]

LOG = logging.getLogger(__name__)


class Status(enum.Enum):
    FIXPOINT = "fixpoint"
    PRUNED = "pruned"
    FAILED = "failed"


class Inconsistency(Exception):
    """Raised inside propagation when a domain is wiped out."""


class LimitExceeded(Exception):
    """A node, time or solution-visit budget ran out before search finished."""

    def __init__(self, reason: str, count: int = 0):
        super().__init__(reason)
        self.reason = reason
        self.count = count


class Domain:
    """Ordered finite set of integers.

    Instances are immutable; every narrowing operation returns a new domain
    (or ``self`` when nothing changes).
    """

    __slots__ = ("_values",)

    def __init__(self, values: Iterable[int]):
        vals = tuple(values)
        for a, b in zip(vals, vals[1:]):
            if not a < b:
                raise ValueError("domain values must be strictly increasing")
        self._values = vals

    @classmethod
    def range(cls, lower: int, upper: int) -> "Domain":
        if lower > upper:
            raise ValueError(f"empty range {lower}..{upper}")
        dom = cls.__new__(cls)
        dom._values = tuple(range(lower, upper + 1))
        return dom

    @classmethod
    def _trusted(cls, values: tuple) -> "Domain":
        dom = cls.__new__(cls)
        dom._values = values
        return dom

    @property
    def values(self) -> tuple:
        return self._values

    @property
    def min(self) -> int:
        return self._values[0]

    @property
    def max(self) -> int:
        return self._values[-1]

    def is_empty(self) -> bool:
        return not self._values

    def is_fixed(self) -> bool:
        return len(self._values) == 1

    def __len__(self) -> int:
        return len(self._values)

    def __iter__(self):
        return iter(self._values)

    def __contains__(self, value) -> bool:
        i = bisect.bisect_left(self._values, value)
        return i < len(self._values) and self._values[i] == value

    def __eq__(self, other) -> bool:
        return isinstance(other, Domain) and self._values == other._values

    def __hash__(self) -> int:
        return hash(self._values)

    def __repr__(self) -> str:
        v = self._values
        if len(v) > 1 and v[-1] - v[0] == len(v) - 1:
            return f"Domain({v[0]}..{v[-1]})"
        return f"Domain({list(v)})"

    def remove_below(self, lower: int) -> "Domain":
        i = bisect.bisect_left(self._values, lower)
        return self if i == 0 else Domain._trusted(self._values[i:])

    def remove_above(self, upper: int) -> "Domain":
        i = bisect.bisect_right(self._values, upper)
        return self if i == len(self._values) else Domain._trusted(self._values[:i])

    def remove_value(self, value: int) -> "Domain":
        i = bisect.bisect_left(self._values, value)
        if i == len(self._values) or self._values[i] != value:
            return self
        return Domain._trusted(self._values[:i] + self._values[i + 1 :])

    def restrict_to(self, value: int) -> "Domain":
        if value in self:
            return self if len(self._values) == 1 else Domain._trusted((value,))
        return Domain._trusted(())


class Propagator:
    """Filtering unit attached to a fixed scope of variables.

    Subclasses implement :meth:`propagate`, narrowing domains through the
    model's ``set_min``/``set_max``/``remove``/``fix`` methods. Those methods
    raise :class:`Inconsistency` on wipe-out, which the engine turns into
    :attr:`Status.FAILED`.
    """

    name = "propagator"

    def __init__(self, variables: Sequence[int]):
        self.variables = tuple(variables)

    def propagate(self, model: "Model") -> None:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} on {len(self.variables)} vars>"


class Model:
    """Variables, domains, propagators and the undo trail."""

    def __init__(self):
        self._domains: list[Domain] = []
        self.names: list[str] = []
        self.scales: dict[int, int] = {}
        self.propagators: list[Propagator] = []
        self.subscriptions: list[list[int]] = []
        self.diagnostics: list[str] = []
        self._trail: list[tuple[int, Domain]] = []
        self._queue: deque[int] = deque()
        self._queued: list[bool] = []
        self._changes = 0

    # -- construction -------------------------------------------------------

    def new_variable(self, lower: int, upper: int, name: str | None = None) -> int:
        return self._register(Domain.range(lower, upper), name)

    def new_variable_sparse(self, values: Iterable[int], name: str | None = None) -> int:
        dom = Domain(values)
        if dom.is_empty():
            raise ValueError("a variable needs at least one value")
        return self._register(dom, name)

    def new_rate_variable(
        self, numerators: Iterable[int], denominator: int, name: str | None = None
    ) -> int:
        """Variable over the positive rationals ``numerator / denominator``."""
        if denominator <= 0:
            raise ValueError("denominator must be positive")
        nums = sorted(set(numerators))
        if not nums or nums[0] <= 0:
            raise ValueError("rates must be positive")
        var = self.new_variable_sparse(nums, name)
        self.scales[var] = denominator
        return var

    def _register(self, dom: Domain, name: str | None) -> int:
        var = len(self._domains)
        self._domains.append(dom)
        self.names.append(name if name is not None else f"x{var}")
        self.subscriptions.append([])
        return var

    def add(self, propagator: Propagator) -> Propagator:
        n = len(self._domains)
        for v in propagator.variables:
            if not 0 <= v < n:
                raise ValueError(f"unknown variable {v}")
        idx = len(self.propagators)
        self.propagators.append(propagator)
        self._queued.append(False)
        for v in set(propagator.variables):
            self.subscriptions[v].append(idx)
        self._enqueue(idx)
        return propagator

    # -- domain access ------------------------------------------------------

    @property
    def num_variables(self) -> int:
        return len(self._domains)

    def domain(self, var: int) -> Domain:
        return self._domains[var]

    def min(self, var: int) -> int:
        return self._domains[var].min

    def max(self, var: int) -> int:
        return self._domains[var].max

    def is_fixed(self, var: int) -> bool:
        return self._domains[var].is_fixed()

    def value(self, var: int):
        """Scaled value of a fixed variable (a Fraction for rate variables)."""
        raw = self._domains[var].min
        den = self.scales.get(var)
        return raw if den is None else Fraction(raw, den)

    def scaled(self, var: int, raw: int):
        den = self.scales.get(var)
        return raw if den is None else Fraction(raw, den)

    # -- narrowing ----------------------------------------------------------

    def _replace(self, var: int, new: Domain) -> bool:
        old = self._domains[var]
        if new is old:
            return False
        if new.is_empty():
            raise Inconsistency(self.names[var])
        self._trail.append((var, old))
        self._domains[var] = new
        self._changes += 1
        for p in self.subscriptions[var]:
            self._enqueue(p)
        return True

    def set_min(self, var: int, lower: int) -> bool:
        return self._replace(var, self._domains[var].remove_below(lower))

    def set_max(self, var: int, upper: int) -> bool:
        return self._replace(var, self._domains[var].remove_above(upper))

    def remove(self, var: int, value: int) -> bool:
        return self._replace(var, self._domains[var].remove_value(value))

    def fix(self, var: int, value: int) -> bool:
        return self._replace(var, self._domains[var].restrict_to(value))

    # -- trail --------------------------------------------------------------

    def mark(self) -> int:
        return len(self._trail)

    def undo(self, mark: int) -> None:
        trail = self._trail
        while len(trail) > mark:
            var, old = trail.pop()
            self._domains[var] = old
        self._clear_queue()

    def snapshot(self) -> tuple:
        return tuple(self._domains)

    # -- propagation --------------------------------------------------------

    def _enqueue(self, idx: int) -> None:
        if not self._queued[idx]:
            self._queued[idx] = True
            self._queue.append(idx)

    def _clear_queue(self) -> None:
        while self._queue:
            self._queued[self._queue.popleft()] = False

    def propagate(self) -> Status:
        """Run queued propagators until no domain changes."""
        before = self._changes
        queue = self._queue
        try:
            while queue:
                idx = queue.popleft()
                self._queued[idx] = False
                self.propagators[idx].propagate(self)
        except Inconsistency:
            self._clear_queue()
            return Status.FAILED
        return Status.PRUNED if self._changes != before else Status.FIXPOINT

    def schedule_all(self) -> None:
        for idx in range(len(self.propagators)):
            self._enqueue(idx)


def propagate_fixpoint(model: Model) -> Status:
    model.schedule_all()
    return model.propagate()


@dataclass(frozen=True)
class Solution(Mapping):
    """Full assignment; rate variables map to :class:`Fraction` values."""

    values: tuple
    names: tuple = ()

    def __getitem__(self, var):
        return self.values[var]

    def __iter__(self):
        return iter(range(len(self.values)))

    def __len__(self):
        return len(self.values)

    def by_name(self) -> dict:
        return dict(zip(self.names, self.values))


VAR_SELECTION = ("smallest_domain", "input_order")
VAL_SELECTION = ("min", "max")


@dataclass
class SearchConfig:
    """Branching and budget settings.

    ``decision_vars`` restricts (and, for ``input_order``, orders) the
    variables branched on; remaining variables must be fixed by propagation
    or are branched on afterwards in index order. ``seed`` shuffles the value
    order of each branching decision deterministically.
    """

    var_selection: str = "smallest_domain"
    val_selection: str = "min"
    decision_vars: Sequence[int] | None = None
    solution_limit: int | None = None
    node_limit: int | None = None
    time_limit: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.var_selection not in VAR_SELECTION:
            raise ValueError(f"unknown variable selection {self.var_selection!r}")
        if self.val_selection not in VAL_SELECTION:
            raise ValueError(f"unknown value selection {self.val_selection!r}")
        for limit in ("solution_limit", "node_limit", "time_limit"):
            v = getattr(self, limit)
            if v is not None and v <= 0:
                raise ValueError(f"{limit} must be positive")


@dataclass
class SearchStats:
    nodes: int = 0
    failures: int = 0
    solutions: int = 0
    wall_time: float = 0.0
    exhausted: bool = False

    def as_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "failures": self.failures,
            "wall_ms": round(self.wall_time * 1000.0, 3),
        }


class _Brancher:
    def __init__(self, model: Model, config: SearchConfig):
        self.model = model
        self.config = config
        n = model.num_variables
        order = list(config.decision_vars) if config.decision_vars is not None else []
        seen = set(order)
        order.extend(v for v in range(n) if v not in seen)
        self.order = order
        self.rng = random.Random(config.seed) if config.seed is not None else None

    def select_variable(self) -> int | None:
        model = self.model
        if self.config.var_selection == "input_order":
            for v in self.order:
                if not model.is_fixed(v):
                    return v
            return None
        best, best_size = None, None
        for v in self.order:
            size = len(model.domain(v))
            if size > 1 and (best_size is None or size < best_size):
                best, best_size = v, size
                if size == 2:
                    break
        return best

    def select_value(self, var: int) -> int:
        dom = self.model.domain(var)
        if self.rng is not None:
            return dom.values[self.rng.randrange(len(dom))]
        return dom.min if self.config.val_selection == "min" else dom.max


def iter_solutions(
    model: Model, config: SearchConfig | None = None, stats: SearchStats | None = None
) -> Iterator[Solution]:
    """Depth-first binary search (``x = v`` then ``x != v``).

    The model is restored to its pre-search state when the generator is
    exhausted or closed. Raises :class:`LimitExceeded` on node/time limits.
    """
    config = config or SearchConfig()
    stats = stats if stats is not None else SearchStats()
    brancher = _Brancher(model, config)
    start = time.perf_counter()
    root = model.mark()
    names = tuple(model.names)
    stack: list[tuple[int, int, int]] = []

    def check_limits():
        if config.node_limit is not None and stats.nodes >= config.node_limit:
            raise LimitExceeded("node limit", stats.solutions)
        if config.time_limit is not None and time.perf_counter() - start > config.time_limit:
            raise LimitExceeded("time limit", stats.solutions)

    try:
        failed = propagate_fixpoint(model) is Status.FAILED
        while True:
            if not failed:
                var = brancher.select_variable()
                if var is None:
                    stats.solutions += 1
                    yield Solution(
                        tuple(model.value(v) for v in range(model.num_variables)), names
                    )
                    failed = True
                else:
                    check_limits()
                    val = brancher.select_value(var)
                    stack.append((model.mark(), var, val))
                    stats.nodes += 1
                    model.fix(var, val)
                    failed = model.propagate() is Status.FAILED
                    continue
            # backtrack: take the right branch of the most recent choice
            if not stack:
                stats.exhausted = True
                return
            mark, var, val = stack.pop()
            model.undo(mark)
            stats.failures += 1
            try:
                model.remove(var, val)
            except Inconsistency:
                model._clear_queue()
                continue
            failed = model.propagate() is Status.FAILED
    finally:
        model.undo(root)
        stats.wall_time += time.perf_counter() - start


def solve(
    model: Model, config: SearchConfig | None = None, stats: SearchStats | None = None
) -> Solution | None:
    """First solution, or ``None`` when the search space is exhausted.

    Raises :class:`LimitExceeded` if a budget runs out first.
    """
    gen = iter_solutions(model, config, stats)
    try:
        return next(gen, None)
    finally:
        gen.close()


def enumerate_solutions(
    model: Model,
    config: SearchConfig | None = None,
    visitor: Callable[[Solution], None] | None = None,
    stats: SearchStats | None = None,
) -> int:
    """Visit every solution once and return how many there were.

    ``config.solution_limit`` stops enumeration early (not an error);
    node/time limits raise :class:`LimitExceeded` carrying the partial count.
    """
    config = config or SearchConfig()
    count = 0
    gen = iter_solutions(model, config, stats)
    try:
        for sol in gen:
            count += 1
            if visitor is not None:
                visitor(sol)
            if config.solution_limit is not None and count >= config.solution_limit:
                break
    except LimitExceeded as exc:
        exc.count = count
        raise
    finally:
        gen.close()
    return count
