"""Non-statistical constraints used by the built-in models."""

from __future__ import annotations

from typing import Sequence

from .solver import Inconsistency, Model, Propagator

__all__ = ["Cumulative", "Linear", "cumulative", "linear"]


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


class Linear(Propagator):
    """``sum(a_k * x_k) (relation) constant`` with relation one of ``=``, ``>=``, ``<=``.

    Bound propagation over integers, iterated to a local fixpoint.
    """

    name = "linear"

    def __init__(self, terms: Sequence[tuple[int, int]], constant: int, relation: str = "="):
        terms = [(int(a), v) for a, v in terms if a != 0]
        if not terms:
            raise ValueError("need at least one non-zero term")
        if relation not in ("=", ">=", "<="):
            raise ValueError(f"unknown relation {relation!r}")
        self.terms = terms
        self.constant = int(constant)
        self.relation = relation
        super().__init__([v for _, v in terms])

    def propagate(self, model: Model) -> None:
        changed = True
        while changed:
            changed = False
            if self.relation in ("=", ">="):
                changed |= self._at_least(model, self.terms, self.constant)
            if self.relation in ("=", "<="):
                negated = [(-a, v) for a, v in self.terms]
                changed |= self._at_least(model, negated, -self.constant)

    @staticmethod
    def _at_least(model: Model, terms, constant: int) -> bool:
        """Filter bounds for ``sum(a x) >= constant``."""
        highs = [a * (model.max(v) if a > 0 else model.min(v)) for a, v in terms]
        total = sum(highs)
        if total < constant:
            raise Inconsistency("linear")
        changed = False
        for (a, v), high in zip(terms, highs):
            need = constant - (total - high)  # a * x >= need
            if a > 0:
                changed |= model.set_min(v, _ceil_div(need, a))
            else:
                changed |= model.set_max(v, need // a)
        return changed

    def __repr__(self) -> str:
        lhs = " + ".join(f"{a}*x{v}" for a, v in self.terms)
        return f"<Linear {lhs} {self.relation} {self.constant}>"


def linear(model: Model, terms, constant: int, relation: str = "=") -> Linear:
    return model.add(Linear(terms, constant, relation))


class Cumulative(Propagator):
    """Renewable resource: at each time point, demand of running tasks <= capacity.

    Task ``k`` occupies ``[start_k, start_k + duration_k)``. Filtering is the
    time-table rule: build the profile of compulsory parts
    ``[max(start), min(start) + duration)``, fail on overload, then push each
    start bound past time points where the task cannot fit on top of the
    others' compulsory load.
    """

    name = "cumulative"

    def __init__(self, starts: Sequence[int], durations: Sequence[int],
                 demands: Sequence[int], capacity: int):
        if not len(starts) == len(durations) == len(demands):
            raise ValueError("starts, durations and demands must have equal length")
        if capacity < 0:
            raise ValueError("capacity must be non-negative")
        if any(d < 0 for d in durations) or any(c < 0 for c in demands):
            raise ValueError("durations and demands must be non-negative")
        self.starts = tuple(starts)
        self.durations = tuple(int(d) for d in durations)
        self.demands = tuple(int(c) for c in demands)
        self.capacity = int(capacity)
        super().__init__(self.starts)

    def profile(self, model: Model) -> dict[int, int]:
        load: dict[int, int] = {}
        for s, d, c in zip(self.starts, self.durations, self.demands):
            if c == 0:
                continue
            lst, ect = model.max(s), model.min(s) + d
            for t in range(lst, ect):
                load[t] = load.get(t, 0) + c
        return load

    def propagate(self, model: Model) -> None:
        cap = self.capacity
        load = self.profile(model)
        if any(v > cap for v in load.values()):
            raise Inconsistency("cumulative")
        for s, d, c in zip(self.starts, self.durations, self.demands):
            if c == 0 or d == 0 or model.is_fixed(s):
                continue
            lst, ect = model.max(s), model.min(s) + d

            def blocked(t: int) -> bool:
                own = c if lst <= t < ect else 0
                return load.get(t, 0) - own + c > cap

            while True:
                est = model.min(s)
                hit = next((t for t in range(est + d - 1, est - 1, -1) if blocked(t)), None)
                if hit is None:
                    break
                model.set_min(s, hit + 1)
            while True:
                late = model.max(s)
                hit = next((t for t in range(late, late + d) if blocked(t)), None)
                if hit is None:
                    break
                model.set_max(s, hit - d)


def cumulative(model: Model, starts, durations, demands, capacity: int, ends=None) -> Cumulative:
    """Post a cumulative resource; optional ``ends`` are tied by ``end = start + duration``."""
    prop = model.add(Cumulative(starts, durations, demands, capacity))
    if ends is not None:
        if len(ends) != len(starts):
            raise ValueError("ends must match starts")
        for s, e, d in zip(starts, ends, durations):
            model.add(Linear([(1, e), (-1, s)], d, "="))
    return prop
