"""Instance file format, canonical serialization, and seeded generators.

The on-disk format is JSON with integer money only:

    {
      "k": 3,
      "mu": 2,                        // optional
      "seller_neighbors": ["a", "b"],
      "buyers": {
        "a": {"values": [4, 3, 1], "neighbors": ["c"]},
        ...
      },
      "meta": {...}                   // optional, ignored by semantics
    }

Labels map to buyer ids in sorted-label order; serialization is canonical
(sorted labels, fixed layout), so equal profiles produce identical bytes.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterator

from .errors import ParseError
from .market import BuyerId, ReportProfile, ReportedType, validate_profile


def _reject_float(value: str):
    raise ParseError(f"float literal {value!r} not allowed; money is integral")


def _no_duplicate_keys(pairs):
    seen = set()
    for key, _ in pairs:
        if key in seen:
            raise ParseError(f"duplicate key {key!r}")
        seen.add(key)
    return dict(pairs)


def _as_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def parse_instance(text: str) -> ReportProfile:
    """Parse and validate instance text into a ReportProfile.

    Buyer labels become ids by sorted-label order; the original labels are
    kept on the profile for display and round-tripping. Structural problems
    raise ParseError; violated model invariants raise ValidationError.
    """
    try:
        doc = json.loads(text, parse_float=_reject_float,
                         object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    for key in ("k", "seller_neighbors", "buyers"):
        if key not in doc:
            raise ParseError(f"missing required key {key!r}")
    for key in doc:
        if key not in ("k", "mu", "seller_neighbors", "buyers", "meta"):
            raise ParseError(f"unknown key {key!r}")
    k = doc["k"]
    if not _as_int(k):
        raise ParseError("k must be an integer")
    mu = doc.get("mu")
    if mu is not None and not _as_int(mu):
        raise ParseError("mu must be an integer when present")
    buyers = doc["buyers"]
    if not isinstance(buyers, dict):
        raise ParseError("buyers must be an object")
    ids = {label: i for i, label in enumerate(sorted(buyers))}

    def resolve(label, context: str) -> BuyerId:
        if not isinstance(label, str):
            raise ParseError(f"{context}: label {label!r} must be a string")
        if label not in ids:
            raise ParseError(f"{context}: unknown buyer label {label!r}")
        return ids[label]

    neighbors = doc["seller_neighbors"]
    if not isinstance(neighbors, list):
        raise ParseError("seller_neighbors must be an array")
    seller = frozenset(resolve(x, "seller_neighbors") for x in neighbors)

    reports: dict[BuyerId, ReportedType] = {}
    for label in sorted(buyers):
        entry = buyers[label]
        if not isinstance(entry, dict) or set(entry) - {"values", "neighbors"}:
            raise ParseError(f"buyer {label!r}: expected values/neighbors object")
        values = entry.get("values")
        if not isinstance(values, list) or not all(_as_int(v) for v in values):
            raise ParseError(f"buyer {label!r}: values must be an array of integers")
        invited = entry.get("neighbors", [])
        if not isinstance(invited, list):
            raise ParseError(f"buyer {label!r}: neighbors must be an array")
        reports[ids[label]] = ReportedType(
            tuple(values),
            frozenset(resolve(x, f"buyer {label!r} neighbors") for x in invited),
        )
    profile = ReportProfile(
        k=k,
        seller_neighbors=seller,
        reports=reports,
        mu=mu,
        labels={i: label for label, i in ids.items()},
    )
    return validate_profile(profile)


def serialize_instance(profile: ReportProfile) -> str:
    """Canonical instance text: sorted labels, fixed layout, trailing newline."""
    label = profile.label_of
    doc: dict = {"k": profile.k}
    if profile.mu is not None:
        doc["mu"] = profile.mu
    doc["seller_neighbors"] = sorted(label(i) for i in profile.seller_neighbors)
    doc["buyers"] = {
        label(i): {
            "values": list(profile.reports[i].values),
            "neighbors": sorted(label(j) for j in profile.reports[i].invited),
        }
        for i in sorted(profile.reports, key=label)
    }
    return json.dumps(doc, indent=2) + "\n"


@dataclass(frozen=True)
class GeneratorConfig:
    """Seeded random-instance recipe.

    `buyers` and `k` are inclusive ranges; `topology` is "tree" or "graph"
    (tree plus extra mutual edges, each sampled with `edge_density`);
    `max_depth` caps the layer a tree parent can sit in.
    """

    seed: int
    buyers: tuple[int, int] = (2, 8)
    k: tuple[int, int] = (1, 3)
    v_max: int = 10
    topology: str = "tree"
    edge_density: float = 0.1
    max_depth: int | None = None
    seller_bias: float = 0.0

    def __post_init__(self):
        if self.buyers[0] > self.buyers[1] or self.buyers[0] < 1:
            raise ValueError(f"bad buyer range {self.buyers}")
        if self.k[0] > self.k[1] or self.k[0] < 1:
            raise ValueError(f"bad k range {self.k}")
        if self.v_max < 1:
            raise ValueError("v_max must be >= 1")
        if self.topology not in ("tree", "graph"):
            raise ValueError(f"unknown topology {self.topology!r}")
        if not 0.0 <= self.seller_bias <= 1.0:
            raise ValueError("seller_bias must be in [0, 1]")


def random_instance(config: GeneratorConfig, index: int = 0) -> ReportProfile:
    """Deterministic instance `index` of the stream seeded by `config.seed`.

    Trees grow by random parent attachment (seller or any earlier buyer whose
    layer allows a child within `max_depth`); `seller_bias` is the extra
    probability of attaching straight to the seller, fattening layer 1.
    Valuations are K uniform draws over [0, v_max] sorted descending. Graphs
    add each extra buyer-buyer edge with probability `edge_density`, reported
    mutually.
    """
    rng = random.Random(f"{config.seed}:{index}")
    n = rng.randint(*config.buyers)
    k = rng.randint(*config.k)
    width = max(2, len(str(max(n - 1, 0))))
    labels = {i: f"b{i:0{width}d}" for i in range(n)}

    layer = {}
    seller_neighbors: set[BuyerId] = set()
    invited: dict[BuyerId, set[BuyerId]] = {i: set() for i in range(n)}
    for i in range(n):
        pool: list[BuyerId] = [-1]
        pool.extend(
            j for j in range(i)
            if config.max_depth is None or layer[j] < config.max_depth
        )
        if config.seller_bias and rng.random() < config.seller_bias:
            parent = -1
        else:
            parent = rng.choice(pool)
        if parent < 0:
            seller_neighbors.add(i)
            layer[i] = 1
        else:
            invited[parent].add(i)
            layer[i] = layer[parent] + 1

    if config.topology == "graph" and config.edge_density > 0:
        for u in range(n):
            for v in range(u + 1, n):
                if v in invited[u] or u in invited[v]:
                    continue
                if rng.random() < config.edge_density:
                    invited[u].add(v)
                    invited[v].add(u)

    reports = {
        i: ReportedType(
            tuple(sorted((rng.randint(0, config.v_max) for _ in range(k)), reverse=True)),
            frozenset(invited[i]),
        )
        for i in range(n)
    }
    profile = ReportProfile(
        k=k,
        seller_neighbors=frozenset(seller_neighbors),
        reports=reports,
        labels=labels,
    )
    return validate_profile(profile)


def instance_stream(config: GeneratorConfig, count: int) -> Iterator[ReportProfile]:
    """The first `count` instances of the config's stream, index order."""
    for index in range(count):
        yield random_instance(config, index)
