"""The four auction mechanisms: first-layer VCG, DNA-MU, LDM-Tree, and LDM.

Every mechanism returns an Outcome mapping each valid buyer to her unit count
and signed payment (negative = reward). Invalid buyers never appear; their
units and payments are 0 by definition and nothing they report can move the
result. Reserve prices are realized as synthetic unit-demand dummy buyers in
layer 1: they compete in every welfare problem, their ids sit above all real
ids so real buyers win ties, and any units they capture are withheld from
sale rather than reassigned.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .market import (
    DUMMY_BASE,
    BuyerId,
    Market,
    Money,
    ReportProfile,
    ReportedType,
    TreeMarket,
    build_bfs_tree,
    compute_market,
    cumulative_value,
    is_dummy,
)
from .removed_sets import removed_sets_for
from .welfare import constrained_welfare, kth_highest_first_unit


@dataclass(frozen=True)
class ReservePrice:
    """Reserve level r, realized as `dummy_count` layer-1 dummies (default K)."""

    r: Money
    dummy_count: int | None = None

    def count_for(self, k: int) -> int:
        return self.dummy_count if self.dummy_count is not None else k


@dataclass(frozen=True)
class LayerRecord:
    """Diagnostic record of one processed LDM layer."""

    layer: int
    removed: frozenset[BuyerId]
    included: frozenset[BuyerId]
    sw: Money
    tentative_units: Mapping[BuyerId, int]
    tentative_value: Mapping[BuyerId, Money]
    sw_minus_d: Mapping[BuyerId, Money]
    k_remain_after: int


@dataclass(frozen=True)
class LdmTrace:
    mu: int
    k: int
    layers: tuple[LayerRecord, ...]
    dummies: frozenset[BuyerId]
    tree: TreeMarket


@dataclass(frozen=True)
class VcgTrace:
    sw: Money
    allocation: Mapping[BuyerId, int]
    sw_without: Mapping[BuyerId, Money]
    dummies: frozenset[BuyerId]


@dataclass(frozen=True)
class DnaRow:
    buyer: BuyerId
    layer: int
    price: Money
    won: bool
    k_before: int


@dataclass(frozen=True)
class DnaTrace:
    rows: tuple[DnaRow, ...]


@dataclass(frozen=True)
class Outcome:
    """Final allocation and payments over the real valid buyers."""

    units: Mapping[BuyerId, int]
    payments: Mapping[BuyerId, Money]
    trace: object | None = None

    def units_of(self, i: BuyerId) -> int:
        return self.units.get(i, 0)

    def payment_of(self, i: BuyerId) -> Money:
        return self.payments.get(i, 0)

    @property
    def revenue(self) -> Money:
        return sum(self.payments.values())


def outcome_welfare(market: Market, outcome: Outcome) -> Money:
    """Total reported value of the allocated units."""
    return sum(
        cumulative_value(market.values_of(i), m) for i, m in outcome.units.items() if m
    )


def inject_dummies(profile: ReportProfile, reserve: ReservePrice) -> ReportProfile:
    """Profile with reserve dummies added to the seller's neighbor set."""
    count = reserve.count_for(profile.k)
    vector = (reserve.r,) + (0,) * (profile.k - 1)
    reports = dict(profile.reports)
    neighbors = set(profile.seller_neighbors)
    for j in range(count):
        ident = DUMMY_BASE + j
        reports[ident] = ReportedType(vector, frozenset())
        neighbors.add(ident)
    return replace(profile, reports=reports, seller_neighbors=frozenset(neighbors))


def _zero_outcome(market: Market, trace=None) -> Outcome:
    zeros = {i: 0 for i in market.valid if not is_dummy(i)}
    return Outcome(units=dict(zeros), payments=dict(zeros), trace=trace)


def run_vcg_first_layer(market: Market, reserve: ReservePrice | None = None) -> Outcome:
    """Clarke-pivot auction of K units among the seller's direct neighbors only.

    Every other valid buyer gets 0 units and pays 0. With a reserve, dummies
    join the first layer for every welfare computation; units they win are
    withheld.
    """
    if reserve is not None:
        aug = compute_market(inject_dummies(market.profile, reserve))
    else:
        aug = market
    k = market.profile.k
    if not aug.layers:
        return _zero_outcome(market, trace=VcgTrace(0, {}, {}, frozenset()))
    layer1 = aug.layers[0]
    full = constrained_welfare(aug, layer1, {}, k)
    units = {i: 0 for i in market.valid}
    payments = {i: 0 for i in market.valid}
    sw_without: dict[BuyerId, Money] = {}
    for i in sorted(layer1):
        if is_dummy(i):
            continue
        if i not in market.valid:
            continue
        pi = full.units_of(i)
        without = constrained_welfare(aug, layer1 - {i}, {}, k).welfare
        sw_without[i] = without
        units[i] = pi
        payments[i] = without - (full.welfare - cumulative_value(aug.values_of(i), pi))
    dummies = frozenset(i for i in layer1 if is_dummy(i))
    trace = VcgTrace(sw=full.welfare, allocation=full.allocation,
                     sw_without=sw_without, dummies=dummies)
    return Outcome(units=units, payments=payments, trace=trace)


def run_dna_mu(tree: TreeMarket, order: str = "id", seed: int | None = None) -> Outcome:
    """DNA-MU: sequential unit-demand allocation, nearer layers first.

    Each buyer is priced at the K'-th highest first-unit value of the market
    with her descendants, the winners so far, and herself removed; she wins
    one unit at that price iff her own first-unit value meets it. Only
    first-unit values are read. Once supply hits zero nothing more is sold.

    `order` is "id" (ascending, the default) or "random" with `seed`, standing
    in for the underspecified within-layer ordering.
    """
    market = tree.market
    k_remaining = market.profile.k
    winners: set[BuyerId] = set()
    units = {i: 0 for i in market.valid}
    payments = {i: 0 for i in market.valid}
    rows: list[DnaRow] = []
    rng = random.Random(seed) if order == "random" else None
    done = False
    for d, layer in enumerate(tree.layers, start=1):
        if done:
            break
        members = sorted(layer)
        if rng is not None:
            rng.shuffle(members)
        for i in members:
            if k_remaining == 0:
                done = True
                break
            pool = market.valid - tree.descendants[i] - winners - {i}
            price = kth_highest_first_unit(market, pool, k_remaining)
            won = tree.first_unit(i) >= price
            rows.append(DnaRow(i, d, price, won, k_remaining))
            if won:
                units[i] = 1
                payments[i] = price
                winners.add(i)
                k_remaining -= 1
    return Outcome(units=units, payments=payments, trace=DnaTrace(tuple(rows)))


def run_ldm_tree(tree: TreeMarket, mu: int, order: Sequence[BuyerId] | None = None,
                 want_trace: bool = True) -> Outcome:
    """Layer-based diffusion mechanism on a rooted tree.

    Per layer l: remove R_l, solve the constrained welfare optimum with all
    lower layers frozen at their committed units, commit each layer-l buyer's
    tentative units, and charge her the welfare difference against the economy
    without her subtree influence (D_i). Stops once all K units are committed,
    zeroing the deeper layers.

    `order` optionally reorders the within-layer buyer loop (a testing hook;
    the outcome provably does not depend on it).
    """
    market = tree.market
    k = market.profile.k
    valid = market.valid
    reports = market.profile.reports
    units = {i: 0 for i in valid if not is_dummy(i)}
    payments = {i: 0 for i in valid if not is_dummy(i)}
    per_buyer_removed = removed_sets_for(tree, mu)
    if not tree.layers:
        trace = LdmTrace(mu, k, (), frozenset(), tree) if want_trace else None
        return Outcome(units=units, payments=payments, trace=trace)

    # suffix[d] = all buyers in 0-based layers >= d; R_l adds suffix[l + 1],
    # i.e. every layer from l + 2 down.
    suffix: list[frozenset[BuyerId]] = [frozenset()] * (tree.depth + 1)
    acc: set[BuyerId] = set()
    for d in range(tree.depth - 1, -1, -1):
        acc |= tree.layers[d]
        suffix[d] = frozenset(acc)

    committed: dict[BuyerId, int] = {}
    k_remain = k
    records: list[LayerRecord] = []
    dummies = frozenset(i for i in valid if is_dummy(i))
    for l in range(1, tree.depth + 1):
        members = sorted(tree.layers[l - 1])
        if order is not None:
            position = {b: p for p, b in enumerate(order)}
            members.sort(key=lambda b: position[b])
        r_l: set[BuyerId] = set(suffix[l + 1]) if l + 1 <= tree.depth else set()
        for i in members:
            r_l |= per_buyer_removed[i]
        included = valid - r_l
        layer_opt = constrained_welfare(market, included, committed, k)
        sw_l = layer_opt.welfare
        sw_d: dict[BuyerId, Money] = {}
        for i in members:
            d_i = r_l | tree.children[i] | {i}
            sw_d[i] = constrained_welfare(market, valid - d_i, committed, k).welfare
            pi = layer_opt.units_of(i)
            if not is_dummy(i):
                units[i] = pi
            if pi:
                k_remain -= pi
                payment = sw_d[i] - (sw_l - cumulative_value(reports[i].values, pi))
            else:
                payment = sw_d[i] - sw_l
            if not is_dummy(i):
                payments[i] = payment
        for i in members:
            committed[i] = layer_opt.units_of(i)
        if want_trace:
            records.append(LayerRecord(
                layer=l,
                removed=frozenset(r_l),
                included=frozenset(included),
                sw=sw_l,
                tentative_units=dict(layer_opt.allocation),
                tentative_value={
                    j: cumulative_value(reports[j].values, m)
                    for j, m in layer_opt.allocation.items()
                },
                sw_minus_d=sw_d,
                k_remain_after=k_remain,
            ))
        if k_remain == 0:
            break
    trace = LdmTrace(mu, k, tuple(records), dummies, tree) if want_trace else None
    return Outcome(units=units, payments=payments, trace=trace)


def run_ldm(market: Market, mu: int, reserve: ReservePrice | None = None) -> Outcome:
    """LDM on general graphs: BFS-tree the market, then run LDM-Tree.

    Reserve dummies are injected before tree construction so they take part
    in every welfare problem; their units are withheld from the final outcome.
    """
    if reserve is None:
        return run_ldm_tree(build_bfs_tree(market), mu)
    aug = compute_market(inject_dummies(market.profile, reserve))
    out = run_ldm_tree(build_bfs_tree(aug), mu)
    units = {i: m for i, m in out.units.items() if not is_dummy(i)}
    payments = {i: p for i, p in out.payments.items() if not is_dummy(i)}
    return Outcome(units=units, payments=payments, trace=out.trace)
