"""Constrained social-welfare maximization by greedy marginal-value allocation.

Because every buyer's marginals are non-increasing, the welfare objective is a
sum of independent concave unit sequences and the greedy that pops the largest
remaining marginal is exactly optimal. ``brute_force_welfare`` is the
independent enumeration oracle used by the tests; it must never share code
with the greedy path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ContractError, FixedOutsideIncluded, OverCommitted, TooLarge
from .market import BuyerId, Market, Money, cumulative_value

Allocation = dict[BuyerId, int]


@dataclass(frozen=True)
class WelfareResult:
    welfare: Money
    allocation: Allocation

    def units_of(self, i: BuyerId) -> int:
        return self.allocation.get(i, 0)


def _check_problem(market: Market, included: frozenset[BuyerId] | set[BuyerId],
                   fixed: Mapping[BuyerId, int], k: int) -> int:
    committed = 0
    for i, m in fixed.items():
        if i not in included:
            raise FixedOutsideIncluded(f"fixed buyer {i} is not in the included set")
        committed += m
    if committed > k:
        raise OverCommitted(f"fixed units {committed} exceed supply {k}")
    return committed


def constrained_welfare(market: Market, included: frozenset[BuyerId] | set[BuyerId],
                        fixed: Mapping[BuyerId, int], k: int) -> WelfareResult:
    """Maximize total reported value over ``included`` with at most k units.

    Buyers in ``fixed`` hold exactly their stated unit count (zero included);
    the remaining supply goes to the free buyers' largest marginals. Ties are
    broken by (larger marginal, smaller buyer id, smaller unit index), which
    pins a single canonical optimum. Welfare counts the fixed buyers'
    cumulative values.
    """
    committed = _check_problem(market, included, fixed, k)
    budget = k - committed
    reports = market.profile.reports

    pool: list[tuple[int, BuyerId, int]] = []
    for i in included:
        if i in fixed:
            continue
        vals = reports[i].values
        for unit, v in enumerate(vals):
            pool.append((-v, i, unit))
    pool.sort()

    allocation: Allocation = {}
    welfare = 0
    for neg_v, i, _unit in pool[:budget]:
        allocation[i] = allocation.get(i, 0) + 1
        welfare -= neg_v
    for i, m in fixed.items():
        if m:
            allocation[i] = m
        welfare += cumulative_value(reports[i].values, m)
    return WelfareResult(welfare=welfare, allocation=allocation)


def brute_force_welfare(market: Market, included: frozenset[BuyerId] | set[BuyerId],
                        fixed: Mapping[BuyerId, int], k: int) -> WelfareResult:
    """Exhaustive oracle: enumerate every split of the free units.

    Guarded to ≤ 8 free buyers and k ≤ 4; testing use only.
    """
    committed = _check_problem(market, included, fixed, k)
    free = sorted(i for i in included if i not in fixed)
    if len(free) > 8 or k > 4:
        raise TooLarge(f"{len(free)} free buyers, k={k}: beyond the oracle guard")
    reports = market.profile.reports
    budget = k - committed
    base = sum(cumulative_value(reports[i].values, m) for i, m in fixed.items())

    best_welfare = base
    best_units: tuple[int, ...] = (0,) * len(free)

    def enumerate_from(idx: int, remaining: int, units: list[int], value: int) -> None:
        nonlocal best_welfare, best_units
        if idx == len(free):
            if value > best_welfare:
                best_welfare = value
                best_units = tuple(units)
            return
        cap = min(remaining, len(reports[free[idx]].values))
        for m in range(cap + 1):
            units.append(m)
            enumerate_from(idx + 1, remaining - m,
                           units, value + cumulative_value(reports[free[idx]].values, m))
            units.pop()

    enumerate_from(0, budget, [], base)
    allocation: Allocation = {i: m for i, m in fixed.items() if m}
    for i, m in zip(free, best_units):
        if m:
            allocation[i] = m
    return WelfareResult(welfare=best_welfare, allocation=allocation)


def kth_highest_first_unit(market: Market, buyers: Iterable[BuyerId], k: int) -> Money:
    """k-th largest first-unit report among ``buyers``; 0 when fewer than k."""
    if k < 1:
        raise ContractError(f"rank k must be >= 1, got {k}")
    firsts = sorted((market.first_unit(i) for i in buyers), reverse=True)
    if len(firsts) < k:
        return 0
    return firsts[k - 1]
