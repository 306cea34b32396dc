"""Network and valuation model: report profiles, the valid-buyer set, layers,
BFS trees, and cumulative-value arithmetic.

All money amounts are exact non-negative integers ("value units"); nothing in
this package ever compares floats. Buyer ids are non-negative integers whose
ascending order is the universal tie-break order. The seller is the sentinel
``SELLER`` (-1); reserve-price dummies, when a mechanism injects them, live at
``DUMMY_BASE`` and above so every real buyer wins id ties against them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .errors import ContractError, ValidationError

BuyerId = int
Money = int
ValuationVector = tuple[int, ...]

SELLER: BuyerId = -1
DUMMY_BASE: BuyerId = 1_000_000_000


def is_dummy(i: BuyerId) -> bool:
    return i >= DUMMY_BASE


@dataclass(frozen=True)
class ReportedType:
    """One buyer's report: a marginal value vector and the neighbors she invites."""

    values: ValuationVector
    invited: frozenset[BuyerId]

    @staticmethod
    def of(values: Iterable[int], invited: Iterable[BuyerId] = ()) -> "ReportedType":
        return ReportedType(tuple(values), frozenset(invited))


@dataclass(frozen=True)
class ReportProfile:
    """All reports plus the seller's own neighbor set.

    ``mu`` and ``labels`` are optional instance metadata carried for file
    round-tripping and CLI defaults; they play no role in mechanism semantics.
    """

    k: int
    seller_neighbors: frozenset[BuyerId]
    reports: Mapping[BuyerId, ReportedType]
    mu: int | None = None
    labels: Mapping[BuyerId, str] | None = None

    def values_of(self, i: BuyerId) -> ValuationVector:
        return self.reports[i].values

    def label_of(self, i: BuyerId) -> str:
        if self.labels is not None and i in self.labels:
            return self.labels[i]
        return str(i)

    def with_report(self, i: BuyerId, report: ReportedType) -> "ReportProfile":
        reports = dict(self.reports)
        reports[i] = report
        return replace(self, reports=reports)


@dataclass(frozen=True)
class Market:
    """A validated profile resolved into the valid-buyer set and its layers.

    ``layers[d-1]`` is the set of valid buyers at shortest invitation-chain
    length d. ``invites`` is the directed adjacency actually used for chain
    construction (j in invites[i] iff i invited j and both are relevant);
    ``edges`` is the undirected view over {seller} + valid buyers.
    """

    profile: ReportProfile
    valid: frozenset[BuyerId]
    layer_of: Mapping[BuyerId, int]
    layers: tuple[frozenset[BuyerId], ...]
    invites: Mapping[BuyerId, frozenset[BuyerId]]
    edges: frozenset[frozenset] = field(repr=False)

    @property
    def k(self) -> int:
        return self.profile.k

    def values_of(self, i: BuyerId) -> ValuationVector:
        return self.profile.reports[i].values

    def first_unit(self, i: BuyerId) -> Money:
        v = self.profile.reports[i].values
        return v[0] if v else 0


@dataclass(frozen=True)
class TreeMarket:
    """Rooted BFS-tree view of a market, used by the tree mechanisms."""

    market: Market
    parent: Mapping[BuyerId, BuyerId]
    children: Mapping[BuyerId, frozenset[BuyerId]]
    descendants: Mapping[BuyerId, frozenset[BuyerId]]
    depth: int

    @property
    def k(self) -> int:
        return self.market.profile.k

    @property
    def layers(self) -> tuple[frozenset[BuyerId], ...]:
        return self.market.layers

    @property
    def valid(self) -> frozenset[BuyerId]:
        return self.market.valid

    def values_of(self, i: BuyerId) -> ValuationVector:
        return self.market.profile.reports[i].values

    def first_unit(self, i: BuyerId) -> Money:
        return self.market.first_unit(i)

    def with_values(self, i: BuyerId, values: ValuationVector) -> "TreeMarket":
        """Same tree with buyer i's value vector swapped.

        Valid because the tree structure depends only on invitations; callers
        that patch values must leave invitations untouched.
        """
        old = self.market.profile.reports[i]
        profile = self.market.profile.with_report(i, ReportedType(tuple(values), old.invited))
        return replace(self, market=replace(self.market, profile=profile))


def _as_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def validate_profile(raw: ReportProfile) -> ReportProfile:
    """Check every type invariant, returning the profile unchanged on success.

    Raises ValidationError naming the first violated invariant in canonical
    id order (profile-level checks first, then buyers ascending).
    """
    if not _as_int(raw.k) or raw.k < 1:
        raise ValidationError(None, f"k must be a positive integer, got {raw.k!r}")
    known = set(raw.reports)
    for s in sorted(raw.seller_neighbors):
        if s not in known:
            raise ValidationError(s, "seller neighbor is not a known buyer")
    for i in sorted(raw.reports):
        if not _as_int(i) or i < 0:
            raise ValidationError(i, "buyer id must be a non-negative integer")
        rep = raw.reports[i]
        vals = rep.values
        if len(vals) != raw.k:
            raise ValidationError(i, f"valuation vector has length {len(vals)}, expected k={raw.k}")
        for v in vals:
            if not _as_int(v) or v < 0:
                raise ValidationError(i, f"marginal value {v!r} is not a non-negative integer")
        for a, b in zip(vals, vals[1:]):
            if a < b:
                raise ValidationError(i, "non-increasing violated")
        if i in rep.invited:
            raise ValidationError(i, "self-invite")
        for j in sorted(rep.invited):
            if j not in known:
                raise ValidationError(i, f"invited unknown buyer {j}")
    return raw


def compute_market(profile: ReportProfile) -> Market:
    """Resolve the valid-buyer set Q and the layer partition by directed BFS.

    A buyer is valid iff an invitation chain from the seller reaches her;
    her layer is the shortest chain length. Buyers outside Q stay in the
    profile but are excluded from all mechanism logic.
    """
    reports = profile.reports
    layer_of: dict[BuyerId, int] = {}
    frontier = sorted(i for i in profile.seller_neighbors if i in reports)
    for i in frontier:
        layer_of[i] = 1
    layers: list[frozenset[BuyerId]] = []
    while frontier:
        layers.append(frozenset(frontier))
        nxt: set[BuyerId] = set()
        for i in frontier:
            for j in reports[i].invited:
                if j not in layer_of and j in reports:
                    layer_of[j] = len(layers) + 1
                    nxt.add(j)
        frontier = sorted(nxt)
    valid = frozenset(layer_of)

    invites = {
        i: frozenset(j for j in reports[i].invited if j in valid) for i in valid
    }
    pairs: set[frozenset] = set()
    for i in valid & profile.seller_neighbors:
        pairs.add(frozenset((SELLER, i)))
    for i in valid:
        for j in invites[i]:
            pairs.add(frozenset((i, j)))
    return Market(
        profile=profile,
        valid=valid,
        layer_of=layer_of,
        layers=tuple(layers),
        invites=invites,
        edges=frozenset(pairs),
    )


def build_bfs_tree(market: Market) -> TreeMarket:
    """Deterministic BFS tree rooted at the seller.

    The frontier expands in ascending id order, so each buyer's parent is the
    smallest-id inviter in the previous layer. Tree layers coincide with
    market layers because BFS preserves shortest distances.
    """
    parent: dict[BuyerId, BuyerId] = {}
    children: dict[BuyerId, set[BuyerId]] = {i: set() for i in market.valid}
    prev: list[BuyerId] = []
    for d, layer in enumerate(market.layers):
        for j in sorted(layer):
            if d == 0:
                parent[j] = SELLER
            else:
                p = min(i for i in prev if j in market.invites[i])
                parent[j] = p
                children[p].add(j)
        prev = sorted(layer)

    descendants: dict[BuyerId, frozenset[BuyerId]] = {}

    def collect(i: BuyerId) -> frozenset[BuyerId]:
        if i not in descendants:
            acc: set[BuyerId] = set()
            for c in children[i]:
                acc.add(c)
                acc |= collect(c)
            descendants[i] = frozenset(acc)
        return descendants[i]

    for i in market.valid:
        collect(i)
    return TreeMarket(
        market=market,
        parent=parent,
        children={i: frozenset(c) for i, c in children.items()},
        descendants=descendants,
        depth=len(market.layers),
    )


def cumulative_value(values: ValuationVector, m: int) -> Money:
    """Total value of receiving m units: the first m marginals summed; 0 for m=0."""
    if m < 0 or m > len(values):
        raise ContractError(f"unit count {m} outside 0..{len(values)}")
    return sum(values[:m])
