"""Competitor-exclusion sets that define the layer-based diffusion mechanism.

For a buyer i with children C_i, the removed set C_i^R joins two groups: her
children who can diffuse further (C_i^P) and her top-ranked childless children
by first-unit value (C_i^W, quota K + mu - |C_i^P|). Removing every layer
member's C^R plus all layers >= l+2 yields the layer removed set R_l; adding
i's own children and i itself yields her payment exclusion set D_i.
"""

from __future__ import annotations

from .errors import ContractError, MuTooSmall
from .market import BuyerId, ReportProfile, TreeMarket


def potential_inviters(tree: TreeMarket, i: BuyerId) -> frozenset[BuyerId]:
    """Children of i who themselves have children (symbolically C_i^P)."""
    if i not in tree.valid:
        raise ContractError(f"buyer {i} is not a valid buyer")
    return frozenset(j for j in tree.children[i] if tree.children[j])


def min_valid_mu(tree: TreeMarket) -> int:
    """Smallest mu the mechanism accepts: the largest |C_i^P| in the tree."""
    best = 0
    for i in tree.valid:
        n = sum(1 for j in tree.children[i] if tree.children[j])
        if n > best:
            best = n
    return best


def robust_mu(profile: ReportProfile) -> int:
    """Prior bound on |C_i^P| valid for every shrunken report profile.

    On graphs, hiding a neighbor can reattach it under a different same-layer
    parent and grow that parent's C^P past the truthful tree's maximum, so a
    bound that must survive deviations counts, per buyer, all invitees who
    themselves invite anyone. On out-trees this equals min_valid_mu.
    """
    best = 0
    for rep in profile.reports.values():
        n = sum(
            1 for w in rep.invited
            if w in profile.reports and profile.reports[w].invited
        )
        if n > best:
            best = n
    return best


def _require_mu(tree: TreeMarket, mu: int) -> None:
    required = min_valid_mu(tree)
    if mu < required:
        raise MuTooSmall(required, mu)


def _winners_unchecked(tree: TreeMarket, i: BuyerId, mu: int,
                       inviters: frozenset[BuyerId]) -> frozenset[BuyerId]:
    candidates = sorted(
        (j for j in tree.children[i] if j not in inviters),
        key=lambda j: (-tree.first_unit(j), j),
    )
    quota = tree.k + mu - len(inviters)
    return frozenset(candidates[:quota])


def potential_winners(tree: TreeMarket, i: BuyerId, mu: int) -> frozenset[BuyerId]:
    """Top K + mu - |C_i^P| children of i (excluding C_i^P) by first-unit value.

    Ties resolve toward the smaller buyer id. With fewer candidates than the
    quota, all of them qualify.
    """
    _require_mu(tree, mu)
    return _winners_unchecked(tree, i, mu, potential_inviters(tree, i))


def removed_set(tree: TreeMarket, i: BuyerId, mu: int) -> frozenset[BuyerId]:
    """C_i^R = C_i^P plus C_i^W: every potential competitor rooted under i."""
    return potential_inviters(tree, i) | potential_winners(tree, i, mu)


def removed_sets_for(tree: TreeMarket, mu: int) -> dict[BuyerId, frozenset[BuyerId]]:
    """All per-buyer removed sets at once, validating mu a single time."""
    _require_mu(tree, mu)
    out: dict[BuyerId, frozenset[BuyerId]] = {}
    for i in tree.valid:
        inviters = potential_inviters(tree, i)
        out[i] = inviters | _winners_unchecked(tree, i, mu, inviters)
    return out


def layer_removed_set(tree: TreeMarket, layer: int, mu: int) -> frozenset[BuyerId]:
    """R_l: the union of C_i^R over layer l, plus every buyer in layers >= l+2."""
    if not 1 <= layer <= tree.depth:
        raise ContractError(f"layer {layer} outside 1..{tree.depth}")
    out: set[BuyerId] = set()
    for i in tree.layers[layer - 1]:
        out |= removed_set(tree, i, mu)
    for d in range(layer + 1, tree.depth):
        out |= tree.layers[d]
    return frozenset(out)


def exclusion_set(tree: TreeMarket, i: BuyerId, mu: int) -> frozenset[BuyerId]:
    """D_i = R_l ∪ C_i ∪ {i} for i in layer l: hides i and all her influence."""
    layer = tree.market.layer_of[i]
    return layer_removed_set(tree, layer, mu) | tree.children[i] | {i}
