"""Signatures of the global constraints the package knows about.

For each global we record, per positional parameter, the conventional key
order of the dictionaries that parameter holds (``None`` when it holds no
dictionaries).  Only the four competition globals have evaluable
semantics; the others are parsed, bound and round-tripped generically.
"""

from __future__ import annotations

from .errors import MalformedParams
from .model import ParamDict, ParamList

SIGNATURES: dict[str, tuple] = {
    "alldifferent": (None,),
    "weightedsum": (("coef", "var"), None, None),
    "element": (None, None, None),
    "cumulative": (("origin", "duration", "end", "height"), None),
    "among": (None, None, None),
    "atleast": (None, None, None),
    "atmost": (None, None, None),
    "cycle": (None, ("index", "succ")),
    "diffn": (("origin", "size", "end"),),
    "disjunctive": (("origin", "duration"),),
    "global_cardinality": (None, ("val", "noccurrence")),
    "global_cardinality_with_costs": (None, ("val", "noccurrence"), ("i", "j", "c"), None),
    "minimum_weight_alldifferent": (None, ("i", "j", "c"), None),
    "not_all_equal": (None,),
    "nvalue": (None, None),
    "nvalues": (None, None, None),
}

ALIASES = {"minimum_weight_all_different": "minimum_weight_alldifferent"}

COMPETITION_GLOBALS = frozenset({"alldifferent", "weightedsum", "element", "cumulative"})


def canonical_name(name: str) -> str:
    name = name.lower()
    return ALIASES.get(name, name)


def signature(name: str):
    """Key orders per parameter for a known global, else None."""
    return SIGNATURES.get(canonical_name(name))


def _bind(value, order):
    if isinstance(value, ParamList):
        return ParamList(tuple(_bind(v, order) for v in value.items))
    if isinstance(value, ParamDict):
        entries = tuple((k, _bind(v, order)) for k, v in value.entries)
        if value.keyed:
            return ParamDict(entries, value.positional)
        if len(entries) != len(order):
            raise MalformedParams(
                f"dictionary in conventional order has {len(entries)} values, "
                f"expected {len(order)} ({', '.join(order)})")
        return ParamDict(tuple(zip(order, (v for _, v in entries))), positional=True)
    return value


def bind_conventional_order(name: str, params) -> tuple:
    """Give keys to every conventional-order dictionary in ``params``.

    Parameters of unknown globals, and parameters without a declared key
    order, are returned unchanged.
    """
    sig = signature(name)
    if sig is None:
        return tuple(params)
    out = []
    for i, value in enumerate(params):
        order = sig[i] if i < len(sig) else None
        out.append(_bind(value, order) if order else value)
    return tuple(out)


def has_unbound_dicts(value) -> bool:
    if isinstance(value, ParamList):
        return any(has_unbound_dicts(v) for v in value.items)
    if isinstance(value, ParamDict):
        return not value.keyed or any(has_unbound_dicts(v) for v in value.values())
    return False


def key_order(name: str, index: int):
    sig = signature(name)
    if sig is None or index >= len(sig):
        return None
    return sig[index]
