"""Shared fixtures: the worked tree example from the figures, the small
hand-traced market T4, and a profile-building shorthand."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

try:
    from netauction.market import ReportProfile, ReportedType, validate_profile
except ImportError:  # running from a checkout without the editable install
    sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
    from netauction.market import ReportProfile, ReportedType, validate_profile

DATA = Path(__file__).parent / "data"

FIG3_LABELS = "abcdefghijklmnopqr"
FIG3_VALUES = {
    "a": (1, 1, 1), "b": (2, 1, 1), "c": (4, 3, 1),
    "d": (11, 2, 1), "e": (9, 1, 1), "f": (3, 1, 1), "g": (5, 2, 1),
    "h": (6, 1, 1), "i": (5, 2, 1),
    "j": (4, 2, 1), "k": (8, 1, 0), "l": (7, 2, 1), "m": (6, 3, 2),
    "n": (5, 3, 1), "o": (4, 2, 2), "p": (3, 1, 1),
    "q": (2, 1, 0), "r": (1, 1, 1),
}
FIG3_INVITES = {"b": "defghi", "f": "j", "g": "klmnop", "n": "q", "o": "r"}


def make_profile(k: int, seller, buyers: dict) -> ReportProfile:
    """buyers: id -> (values tuple, iterable of invited ids)."""
    reports = {
        i: ReportedType(tuple(values), frozenset(invited))
        for i, (values, invited) in buyers.items()
    }
    return validate_profile(
        ReportProfile(k=k, seller_neighbors=frozenset(seller), reports=reports)
    )


def fig3_ids(chars: str) -> set[int]:
    return {FIG3_LABELS.index(c) for c in chars}


@pytest.fixture(scope="session")
def fig3_profile() -> ReportProfile:
    lid = {c: i for i, c in enumerate(FIG3_LABELS)}
    buyers = {
        lid[c]: (FIG3_VALUES[c], [lid[x] for x in FIG3_INVITES.get(c, "")])
        for c in FIG3_LABELS
    }
    profile = make_profile(3, {lid["a"], lid["b"], lid["c"]}, buyers)
    return profile


@pytest.fixture(scope="session")
def t4_profile() -> ReportProfile:
    return make_profile(1, {1, 2}, {
        1: ((1,), {3, 4, 5}),
        2: ((4,), ()),
        3: ((9,), ()),
        4: ((8,), ()),
        5: ((7,), ()),
    })
