"""Reading groups, graphs of groups and factor counts; writing JSON reports."""

import json
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Union

from autfa.errors import InfiniteDegree, ParseError, ValidationError
from autfa.fa_decision import AbstractFlags, FactorClassInput
from autfa.gog import Edge, GraphOfGroups
from autfa.groups import FiniteGroup, GroupMap
from autfa.words import INFINITE_CYCLIC, FactorSpec, FreeProductSignature

PathLike = Union[str, Path]


def shipped_groups() -> List[str]:
    """Names of the groups shipped in ``autfa/data``."""
    data = resources.files("autfa").joinpath("data")
    return sorted(p.name[: -len(".json")] for p in data.iterdir() if p.name.endswith(".json"))


def _read_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{source}: invalid JSON: {e}") from e


def load_group(path: PathLike) -> FiniteGroup:
    """
    Load a group file.

    Group files are JSON objects ``{"name": str, "order": n, "table": [[int]]}``.

    Parameters
    ----------
    path : str or Path
        Path to the file.

    Returns
    -------
    FiniteGroup
        The validated group.

    Raises
    ------
    ParseError
        If the file is not JSON or lacks a table.
    AxiomViolation
        If the table is not a group.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"cannot read group file {path}: {e}") from e
    data = _read_json(text, str(path))
    if not isinstance(data, dict) or "table" not in data:
        raise ParseError(f"{path}: a group file needs a 'table' field")
    data.setdefault("name", path.stem)
    return FiniteGroup.from_dict(data)


def resolve_group(ref: str) -> FiniteGroup:
    """A shipped group by name (``"S3"``), otherwise a group file path."""
    ref = ref.strip()
    if ref in shipped_groups():
        text = resources.files("autfa").joinpath("data", f"{ref}.json").read_text(encoding="utf-8")
        return FiniteGroup.from_dict(_read_json(text, ref))
    if Path(ref).is_file():
        return load_group(ref)
    shipped = ", ".join(shipped_groups())
    raise ValidationError(f"unknown group {ref!r}; shipped groups are {shipped}")


def parse_signature(text: str) -> FreeProductSignature:
    """
    Parse a factor list such as ``"C2,C3"``, ``"C2*S3*Z"`` or ``"S3*S3"``.

    ``Z`` stands for the infinite cyclic group; every other entry goes
    through ``resolve_group``.
    """
    parts = [p.strip() for p in text.replace("*", ",").split(",") if p.strip()]
    if not parts:
        raise ParseError("empty factor list")
    specs: List[FactorSpec] = [
        INFINITE_CYCLIC if p == "Z" else FactorSpec(resolve_group(p)) for p in parts
    ]
    return FreeProductSignature(tuple(specs))


def graph_of_groups_from_dict(data: Dict[str, Any]) -> GraphOfGroups:
    """
    Build a graph of groups from its file representation.

    The object has ``"vertices"`` (group references) and ``"edges"``, each
    with ``id``, ``rev``, ``from``, ``to``, ``edge_group`` and ``alpha`` (the
    images of the edge group elements in the target vertex group).

    Raises
    ------
    InfiniteDegree
        If a vertex group is ``"Z"``.
    ParseError
        If a field is missing.
    """
    try:
        refs = data["vertices"]
        raw_edges = data["edges"]
    except (KeyError, TypeError) as e:
        raise ParseError(f"graph of groups needs 'vertices' and 'edges': {e}") from e
    vertices = []
    for ref in refs:
        if isinstance(ref, str) and ref.strip() == "Z":
            raise InfiniteDegree("vertex group Z would give a vertex of infinite degree")
        vertices.append(FiniteGroup.from_dict(ref) if isinstance(ref, dict) else resolve_group(ref))
    edges = []
    for raw in raw_edges:
        try:
            ref = raw["edge_group"]
            group = FiniteGroup.from_dict(ref) if isinstance(ref, dict) else resolve_group(ref)
            target = int(raw["to"])
            alpha = GroupMap(group, vertices[target], tuple(raw["alpha"]))
            eid, rev, source = int(raw["id"]), int(raw["rev"]), int(raw["from"])
            edges.append(Edge(eid, rev, source, target, group, alpha))
        except (KeyError, TypeError, IndexError) as e:
            raise ParseError(f"malformed edge {raw!r}: {e}") from e
    return GraphOfGroups(tuple(vertices), tuple(edges))


def load_graph_of_groups(path: PathLike) -> GraphOfGroups:
    """Load a graph-of-groups JSON file."""
    path = Path(path)
    return graph_of_groups_from_dict(_read_json(path.read_text(encoding="utf-8"), str(path)))


def _factor_of(name: str) -> Union[FiniteGroup, FactorSpec]:
    return INFINITE_CYCLIC if name == "Z" else resolve_group(name)


def parse_factor_counts(text: str) -> List[FactorClassInput]:
    """
    Parse ``"C2:4,S3:1"`` into factor classes.

    A missing count means 1. ``Z:n`` is a free factor of rank n.
    """
    classes = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, _, count = item.partition(":")
        try:
            n = int(count) if count else 1
        except ValueError as e:
            raise ParseError(f"bad multiplicity in {item!r}") from e
        classes.append(FactorClassInput(_factor_of(name.strip()), n))
    if not classes:
        raise ParseError("no factors given")
    return classes


def factor_classes_from_data(data: Any) -> List[FactorClassInput]:
    """
    Factor classes from decoded JSON.

    Accepts a list of entries ``{"factor": ref, "count": n}`` or
    ``{"flags": {"name": ..., "has_fa": ...}, "count": n}``, or an object
    with a ``"factors"`` list of such entries.
    """
    if isinstance(data, dict):
        data = data.get("factors")
    if not isinstance(data, list) or not data:
        raise ParseError("a factor file needs a non-empty list of factors")
    classes = []
    for entry in data:
        if not isinstance(entry, dict):
            raise ParseError(f"factor entry must be an object, got {entry!r}")
        count = int(entry.get("count", 1))
        if "flags" in entry:
            classes.append(FactorClassInput(AbstractFlags.from_dict(entry["flags"]), count))
        elif "factor" in entry:
            ref = entry["factor"]
            spec = FiniteGroup.from_dict(ref) if isinstance(ref, dict) else _factor_of(ref)
            classes.append(FactorClassInput(spec, count))
        else:
            raise ParseError(f"factor entry needs 'factor' or 'flags': {entry!r}")
    return classes


def load_factor_classes(path: PathLike) -> List[FactorClassInput]:
    """Load a factor-count JSON file."""
    path = Path(path)
    return factor_classes_from_data(_read_json(path.read_text(encoding="utf-8"), str(path)))


def dump_json(data: Any) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_text(path: PathLike, text: str) -> None:
    """Write ``text`` to ``path``, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
