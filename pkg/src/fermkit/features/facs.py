"""Action-unit combination lookup."""

from __future__ import annotations

from ..errors import InvalidArgument

UNKNOWN = "Unknown"

AU_NAMES = {
    0: "Neutral face", 1: "Inner brow raiser", 2: "Outer brow raiser", 4: "Brow lowered",
    5: "Upper lid raiser", 6: "Cheek raiser", 7: "Lid tightener", 8: "Lips toward each other",
    9: "Nose wrinkle", 10: "Upper lip raiser", 11: "Nasolabial deepener", 12: "Lip corner puller",
    13: "Sharp lip puller", 14: "Dimple", 15: "Lip corner depressor", 16: "Lower lip depressor",
    17: "Chin raiser", 18: "Lip pucker", 19: "Tongue show", 20: "Lip stretcher",
}

EXPRESSIONS = {
    frozenset({1, 2, 5, 25, 26}): "Surprise",
    frozenset({6, 12}): "Joy",
    frozenset({1, 15, 17}): "Sadness",
    frozenset({4, 7, 9, 10, 25}): "Anger",
}


def facs_expression(aus) -> str:
    """Exact-set match against the known combinations, else 'Unknown'."""
    key = set()
    for a in aus:
        if isinstance(a, bool) or int(a) != a or a < 0:
            raise InvalidArgument(f"action units are non-negative integers, got {a!r}")
        key.add(int(a))
    return EXPRESSIONS.get(frozenset(key), UNKNOWN)
