"""The JSON model-file format: loading, validation diagnostics, canonical saving.

A model file declares the state space, the group (by per-element
permutations, with the Cayley table either given explicitly or synthesized
by closing the permutations), the experiments with their value maps, the
connection elements, and the reference experiment.  See README.md for the
schema.  Two example models ship with the package and can be referred to
by bare name: ``spin3`` and ``triangle6``.
"""

from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path

import numpy as np

from .errors import ModelError, ParseError, UnfaithfulAction, UnresolvedReference
from .groups import FiniteGroup, GroupAction
from .models import Experiment, ExperimentCatalog, ExperimentModel
from .reports import canonical_dumps

FORMAT_VERSION = 1
BUNDLED_MODELS = ("spin3", "triangle6")

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def assets_dir() -> Path:
    return Path(__file__).parent / "assets"


def resolve_model_path(name_or_path: str) -> Path:
    """Resolve a bundled model name or a filesystem path."""
    p = Path(name_or_path)
    if p.suffix == "" and "/" not in str(name_or_path) and "\\" not in str(name_or_path):
        candidate = assets_dir() / f"{name_or_path}.json"
        if candidate.exists():
            return candidate
    return p


def _expect(data, key, kind, path):
    if key not in data:
        raise ParseError(f"missing required field {key!r}", path=path)
    value = data[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(
            f"field {key!r} must be {getattr(kind, '__name__', kind)}",
            path=f"{path}.{key}" if path else key,
        )
    return value


def _parse_perm(spec, points, point_index, path):
    """A permutation given as an index array or as cycle notation."""
    if isinstance(spec, str):
        if spec.strip() in ("", "()"):
            return list(range(len(points)))
        chunks = _CYCLE_RE.findall(spec)
        if not chunks or _CYCLE_RE.sub("", spec).strip():
            raise ParseError(f"malformed cycle notation {spec!r}", path=path)
        perm = list(range(len(points)))
        for chunk in chunks:
            names = chunk.split()
            idx = []
            for nm in names:
                if nm not in point_index:
                    raise UnresolvedReference(f"unknown point {nm!r} in cycle", path=path)
                idx.append(point_index[nm])
            if len(set(idx)) != len(idx):
                raise ParseError(f"repeated point in cycle {chunk!r}", path=path)
            for i, p in enumerate(idx):
                perm[p] = idx[(i + 1) % len(idx)]
        return perm
    if isinstance(spec, list):
        if sorted(x if isinstance(x, int) else -1 for x in spec) != list(range(len(points))):
            raise UnfaithfulAction("row is not a permutation of point indices", path=path)
        return [int(x) for x in spec]
    raise ParseError("permutation must be an index array or cycle string", path=path)


def _close_permutations(names, perms):
    """Close a permutation list under composition, naming new elements.

    Returns (element_names, perm_rows, cayley).  Fails when two distinct
    declared elements share a permutation (the table cannot be synthesized
    from an unfaithful action).
    """
    n_points = len(perms[0])
    by_perm = {}
    for name, perm in zip(names, perms):
        key = tuple(perm)
        if key in by_perm:
            raise UnfaithfulAction(
                f"elements {by_perm[key]!r} and {name!r} act identically; "
                "cannot synthesize a Cayley table",
                path=f"group.action.{name}",
            )
        by_perm[key] = name
    all_names = list(names)
    all_perms = [list(p) for p in perms]
    ident = tuple(range(n_points))
    if ident not in by_perm:
        if "id" in all_names:
            raise ParseError("cannot synthesize identity name 'id': taken",
                             path="group.elements")
        all_names.append("id")
        all_perms.append(list(ident))
        by_perm[ident] = "id"
    i = 0
    while i < len(all_perms):
        j = 0
        while j < len(all_perms):
            # right-action composition: p . (g h) = (p . g) . h
            prod = tuple(all_perms[j][all_perms[i][p]] for p in range(n_points))
            if prod not in by_perm:
                name = f"g{len(all_names)}"
                while name in all_names:
                    name += "_"
                by_perm[prod] = name
                all_names.append(name)
                all_perms.append(list(prod))
            j += 1
        i += 1
    index = {tuple(p): k for k, p in enumerate(all_perms)}
    order = len(all_names)
    cayley = np.zeros((order, order), dtype=np.int64)
    for a in range(order):
        for b in range(order):
            prod = tuple(all_perms[b][all_perms[a][p]] for p in range(n_points))
            cayley[a, b] = index[prod]
    return all_names, all_perms, cayley


def model_from_data(data: dict) -> ExperimentModel:
    """Build and validate an :class:`ExperimentModel` from parsed JSON."""
    if not isinstance(data, dict):
        raise ParseError("model file must contain a JSON object")
    version = _expect(data, "format_version", int, "")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version}", path="format_version")

    points = _expect(data, "phi", list, "")
    if not points or not all(isinstance(p, str) for p in points):
        raise ParseError("phi must be a non-empty list of point names", path="phi")
    if len(set(points)) != len(points):
        raise ParseError("duplicate point names", path="phi")
    point_index = {p: i for i, p in enumerate(points)}

    gdata = _expect(data, "group", dict, "")
    elements = _expect(gdata, "elements", list, "group")
    if not elements or not all(isinstance(e, str) for e in elements):
        raise ParseError("group.elements must be a non-empty list of names",
                         path="group.elements")
    action_data = _expect(gdata, "action", dict, "group")
    perms = []
    for name in elements:
        if name not in action_data:
            raise ParseError(f"no permutation declared for element {name!r}",
                             path=f"group.action.{name}")
        perms.append(_parse_perm(action_data[name], points, point_index,
                                 path=f"group.action.{name}"))
    for name in action_data:
        if name not in elements:
            raise UnresolvedReference(f"action declared for unknown element {name!r}",
                                      path=f"group.action.{name}")

    if "cayley" in gdata:
        try:
            group = FiniteGroup(elements, gdata["cayley"])
        except Exception as exc:
            raise ParseError(str(exc), path="group.cayley") from exc
        perm_rows = perms
        names = list(elements)
    else:
        names, perm_rows, cayley = _close_permutations(elements, perms)
        group = FiniteGroup(names, cayley)

    try:
        action = GroupAction(group, points, perm_rows)
    except Exception as exc:
        raise UnfaithfulAction(str(exc), path="group.action") from exc

    exps_data = _expect(data, "experiments", dict, "")
    if not exps_data:
        raise ParseError("at least one experiment is required", path="experiments")
    experiments = []
    for label in sorted(exps_data):
        edata = exps_data[label]
        if not isinstance(edata, dict):
            raise ParseError("experiment entry must be an object",
                             path=f"experiments.{label}")
        values_map = _expect(edata, "values", dict, f"experiments.{label}")
        for pname in values_map:
            if pname not in point_index:
                raise UnresolvedReference(f"unknown point {pname!r}",
                                          path=f"experiments.{label}.values.{pname}")
        missing = [p for p in points if p not in values_map]
        if missing:
            raise ParseError(f"value map missing points: {', '.join(missing[:4])}",
                             path=f"experiments.{label}.values")
        labels_at = {}
        for pname, v in values_map.items():
            if not isinstance(v, str):
                raise ParseError("value labels must be strings",
                                 path=f"experiments.{label}.values.{pname}")
            labels_at[point_index[pname]] = v
        values = tuple(sorted(set(labels_at.values())))
        vindex = {v: k for k, v in enumerate(values)}
        value_map = [vindex[labels_at[i]] for i in range(len(points))]
        eigen = None
        if "eigenvalues" in edata:
            emap = edata["eigenvalues"]
            if not isinstance(emap, dict):
                raise ParseError("eigenvalues must be an object value -> number",
                                 path=f"experiments.{label}.eigenvalues")
            for v in emap:
                if v not in vindex:
                    raise UnresolvedReference(
                        f"eigenvalue declared for unknown value {v!r}",
                        path=f"experiments.{label}.eigenvalues.{v}")
            missing_eigen = [v for v in values if v not in emap]
            if missing_eigen:
                raise ParseError(
                    f"eigenvalues missing for: {', '.join(missing_eigen)}",
                    path=f"experiments.{label}.eigenvalues")
            eigen = [float(emap[v]) for v in values]
        try:
            experiments.append(Experiment(label, value_map, values, eigen))
        except ModelError:
            raise
        except Exception as exc:
            raise ParseError(str(exc), path=f"experiments.{label}") from exc

    conns_data = _expect(data, "connections", dict, "")
    connections = {}
    for key in sorted(conns_data):
        if "->" not in key:
            raise ParseError(f"connection key {key!r} must look like 'a->b'",
                             path=f"connections.{key}")
        a, b = key.split("->", 1)
        gname = conns_data[key]
        if not isinstance(gname, str):
            raise ParseError("connection value must be an element name",
                             path=f"connections.{key}")
        if gname not in group.elements:
            raise UnresolvedReference(f"unknown group element {gname!r}",
                                      path=f"connections.{key}")
        connections[(a, b)] = group.index(gname)

    reference = _expect(data, "reference", str, "")
    catalog = ExperimentCatalog(experiments, connections, reference, group)
    return ExperimentModel(action, catalog)


def load_model(name_or_path: str) -> ExperimentModel:
    """Load and validate a model file (bundled name or path)."""
    path = resolve_model_path(name_or_path)
    if not path.exists():
        raise ParseError(f"model file not found: {name_or_path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: "
                         f"{exc.msg}") from exc
    return model_from_data(data)


def model_to_data(model: ExperimentModel) -> dict:
    """Canonical dict form of a model (explicit table, all connections)."""
    group = model.group
    action = model.action
    catalog = model.catalog
    return {
        "format_version": FORMAT_VERSION,
        "phi": list(action.points),
        "group": {
            "elements": list(group.elements),
            "action": {group.elements[g]: action.perms[g].tolist()
                       for g in range(len(group))},
            "cayley": group.cayley.tolist(),
        },
        "experiments": {
            label: {
                "values": {action.points[p]: catalog[label].values[catalog[label].value_map[p]]
                           for p in range(len(action.points))},
                "eigenvalues": {v: catalog[label].eigenvalues[k]
                                for k, v in enumerate(catalog[label].values)},
            }
            for label in catalog.labels
        },
        "connections": {
            f"{a}->{b}": group.elements[catalog.connections[(a, b)]]
            for a in catalog.labels for b in catalog.labels if a != b
        },
        "reference": catalog.reference,
    }


def canonical_model_text(model: ExperimentModel) -> str:
    return canonical_dumps(model_to_data(model))


def save_model(model: ExperimentModel, path=None) -> str:
    text = canonical_model_text(model)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def model_hash(model: ExperimentModel) -> str:
    return hashlib.sha256(canonical_model_text(model).encode("utf-8")).hexdigest()
