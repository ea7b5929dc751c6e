"""Loading, validating and saving model documents.

A model document is a JSON object with this shape::

    {
      "schema": "ipmc-model/1",
      "atoms": ["start", "try", ...],
      "states": [{"id": "start", "labels": ["start"], "reward": 0}, ...],
      "horizon": 6,
      "initial": "start",                  # or {"start": 0.5, "try": 0.5}
      "transitions": {
        "start": {"probs": {"try": 1.0}},
        "try":   {"contaminate": {"center": {"delivered": 0.9, "lost": 0.1},
                                   "eps": 0.01}},
        "lost":  {"intervals": {"try": [1.0, 1.0]}},
        "other": {"vertices": [{"a": 0.3, "b": 0.7}, {"a": 0.5, "b": 0.5}]}
      }
    }

Rows may be given as a single distribution (``probs``), per-state
probability intervals (``intervals``), an explicit list of extreme
distributions (``vertices``), or a contaminated distribution
(``contaminate``), which expands to the corresponding interval row.
States omitted from a row get probability zero.  ``reward`` entries are
optional but must be present on every state or on none.
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .credal import PMF, CredalSet, StateSpace, linear_vacuous
from .errors import IncoherentCredalSetError, IpmcError, SchemaError
from .inference import TransitionModel

SCHEMA_VERSION = "ipmc-model/1"

_ROW_KINDS = ("probs", "intervals", "vertices", "contaminate")


def _require(condition, field, message):
    if not condition:
        raise SchemaError(field, message)


def _check_number(value, field, lo=None, hi=None):
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             field, "expected a number")
    if lo is not None:
        _require(value >= lo, field, f"must be >= {lo}")
    if hi is not None:
        _require(value <= hi, field, f"must be <= {hi}")


def _check_state_map(mapping, declared, field):
    _require(isinstance(mapping, dict) and mapping, field,
             "expected a non-empty object keyed by state ids")
    for key in mapping:
        _require(key in declared, f"{field}.{key}", "references an undeclared state")


def validate_document(doc) -> None:
    """Raise :class:`SchemaError` unless ``doc`` is a well-formed document."""
    _require(isinstance(doc, dict), "$", "expected a JSON object")
    _require(doc.get("schema") == SCHEMA_VERSION, "schema",
             f"expected {SCHEMA_VERSION!r}")

    atoms = doc.get("atoms")
    _require(isinstance(atoms, list) and all(isinstance(a, str) for a in atoms),
             "atoms", "expected a list of strings")

    states = doc.get("states")
    _require(isinstance(states, list) and states, "states",
             "expected a non-empty list")
    ids = []
    rewards_seen = set()
    for i, entry in enumerate(states):
        field = f"states[{i}]"
        _require(isinstance(entry, dict), field, "expected an object")
        _require(isinstance(entry.get("id"), str), f"{field}.id",
                 "expected a string")
        ids.append(entry["id"])
        labels = entry.get("labels", [])
        _require(isinstance(labels, list), f"{field}.labels", "expected a list")
        for lab in labels:
            _require(lab in atoms, f"{field}.labels",
                     f"label {lab!r} is not a declared atom")
        if "reward" in entry:
            _check_number(entry["reward"], f"{field}.reward", lo=0)
            _require(float(entry["reward"]).is_integer(), f"{field}.reward",
                     "expected a natural number")
            rewards_seen.add(True)
        else:
            rewards_seen.add(False)
        unknown = set(entry) - {"id", "labels", "reward"}
        _require(not unknown, field, f"unknown keys {sorted(unknown)}")
    _require(len(set(ids)) == len(ids), "states", "state ids must be unique")
    _require(len(rewards_seen) == 1, "states",
             "rewards must be declared on every state or on none")

    _check_number(doc.get("horizon"), "horizon", lo=0)
    _require(float(doc["horizon"]).is_integer(), "horizon",
             "expected a natural number")

    declared = set(ids)
    if "initial" in doc:
        initial = doc["initial"]
        if isinstance(initial, str):
            _require(initial in declared, "initial", "undeclared state")
        else:
            _check_state_map(initial, declared, "initial")
            for key, weight in initial.items():
                _check_number(weight, f"initial.{key}", lo=0, hi=1)

    transitions = doc.get("transitions")
    _require(isinstance(transitions, dict), "transitions", "expected an object")
    _require(set(transitions) == declared, "transitions",
             "must define exactly one row per declared state")
    for state, row in transitions.items():
        field = f"transitions.{state}"
        _require(isinstance(row, dict) and len(row) == 1
                 and next(iter(row)) in _ROW_KINDS,
                 field, f"expected exactly one of {list(_ROW_KINDS)}")
        kind, body = next(iter(row.items()))
        if kind == "probs":
            _check_state_map(body, declared, f"{field}.probs")
            for key, p in body.items():
                _check_number(p, f"{field}.probs.{key}", lo=0, hi=1)
        elif kind == "intervals":
            _check_state_map(body, declared, f"{field}.intervals")
            for key, pair in body.items():
                sub = f"{field}.intervals.{key}"
                _require(isinstance(pair, list) and len(pair) == 2, sub,
                         "expected [lower, upper]")
                _check_number(pair[0], sub, lo=0, hi=1)
                _check_number(pair[1], sub, lo=0, hi=1)
        elif kind == "vertices":
            _require(isinstance(body, list) and body, f"{field}.vertices",
                     "expected a non-empty list of distributions")
            for j, vertex in enumerate(body):
                _check_state_map(vertex, declared, f"{field}.vertices[{j}]")
                for key, p in vertex.items():
                    _check_number(p, f"{field}.vertices[{j}].{key}", lo=0, hi=1)
        else:
            _require(isinstance(body, dict), f"{field}.contaminate",
                     "expected an object")
            _check_state_map(body.get("center"), declared,
                             f"{field}.contaminate.center")
            for key, p in body["center"].items():
                _check_number(p, f"{field}.contaminate.center.{key}", lo=0, hi=1)
            _check_number(body.get("eps"), f"{field}.contaminate.eps", lo=0, hi=1)
            unknown = set(body) - {"center", "eps"}
            _require(not unknown, f"{field}.contaminate",
                     f"unknown keys {sorted(unknown)}")

    unknown = set(doc) - {"schema", "atoms", "states", "horizon", "initial",
                          "transitions"}
    _require(not unknown, "$", f"unknown keys {sorted(unknown)}")


def load_document(path) -> dict:
    """Read and validate a model document from a JSON file."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc}") from exc
    validate_document(doc)
    return doc


def save_document(doc, path) -> None:
    """Validate and write a model document; inverse of :func:`load_document`."""
    validate_document(doc)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=2)
        handle.write("\n")


def _weights_from_map(space, mapping) -> np.ndarray:
    weights = np.zeros(len(space))
    for key, value in mapping.items():
        weights[space.position(key)] = float(value)
    return weights


def model_from_document(doc) -> TransitionModel:
    """Build a validated :class:`TransitionModel` from a document."""
    validate_document(doc)
    space = StateSpace(entry["id"] for entry in doc["states"])
    labels = [frozenset(entry.get("labels", [])) for entry in doc["states"]]
    if all("reward" in entry for entry in doc["states"]):
        rewards = [int(entry["reward"]) for entry in doc["states"]]
    else:
        rewards = None

    rows = []
    for state in space.states:
        kind, body = next(iter(doc["transitions"][state].items()))
        try:
            if kind == "probs":
                rows.append(CredalSet.from_pmf(PMF(space, _weights_from_map(space, body))))
            elif kind == "intervals":
                lower = np.zeros(len(space))
                upper = np.zeros(len(space))
                for key, (lo, hi) in body.items():
                    lower[space.position(key)] = float(lo)
                    upper[space.position(key)] = float(hi)
                rows.append(CredalSet.from_intervals(space, lower, upper))
            elif kind == "vertices":
                pmfs = [PMF(space, _weights_from_map(space, v)) for v in body]
                rows.append(CredalSet.from_vertices(space, pmfs))
            else:
                center = PMF(space, _weights_from_map(space, body["center"]))
                rows.append(linear_vacuous(center, float(body["eps"])))
        except IpmcError as exc:
            raise type(exc)(f"row for state {state!r}: {exc}") from exc

    initial = doc.get("initial")
    if isinstance(initial, dict):
        initial = PMF(space, _weights_from_map(space, initial))

    return TransitionModel(
        space,
        rows,
        labels=labels,
        atoms=doc["atoms"],
        rewards=rewards,
        horizon=int(doc["horizon"]),
        initial=initial,
    )


def load_model(path) -> TransitionModel:
    """Load a model document from disk and build the transition model."""
    return model_from_document(load_document(path))


def substitute_eps(doc, eps: float) -> dict:
    """Copy of ``doc`` with every contaminated row set to the given level."""
    doc = json.loads(json.dumps(doc))
    found = False
    for row in doc["transitions"].values():
        if "contaminate" in row:
            row["contaminate"]["eps"] = float(eps)
            found = True
    if not found:
        raise IpmcError("model has no contaminated rows to sweep over")
    return doc


def bundled_model_names():
    """Names of the example models shipped with the package."""
    root = resources.files("ipmc.models")
    return sorted(
        entry.name[: -len(".json")]
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    )


def bundled_model_path(name: str):
    """Filesystem path of a bundled example model."""
    if name.endswith(".json"):
        name = name[: -len(".json")]
    path = resources.files("ipmc.models") / f"{name}.json"
    if not path.is_file():
        raise FileNotFoundError(
            f"no bundled model {name!r}; available: {', '.join(bundled_model_names())}"
        )
    return path
