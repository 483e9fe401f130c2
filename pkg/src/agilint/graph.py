"""Embedded in-memory property graph for development artifacts.

The store holds a closed schema of eight node labels (Issue, Event, Label,
Milestone, Commit, File, TestRun, Developer) and seven edge types. It keeps
a per-label node index, a per-(label, property-key) value index, and
adjacency lists in both directions, so pattern evaluation never needs a
full scan.

Writes follow a single-writer contract: ingestion mutates the store, and
once loading is done the store is treated as immutable and may be read
from any number of threads.

Property values are plain Python types: ``str``, ``int``, ``float``,
``bool``, timezone-aware ``datetime`` (normalized to UTC, second
precision), and ``list[str]``. In snapshots, timestamps are rendered as
``YYYY-MM-DDTHH:MM:SSZ`` strings; any string property of exactly that
shape deserializes back as a timestamp (the one encoding convention of
the format).
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Union

PropertyValue = Union[str, int, float, bool, datetime, list]

NODE_LABELS = (
    "Issue",
    "Event",
    "Label",
    "Milestone",
    "Commit",
    "File",
    "TestRun",
    "Developer",
)

EDGE_TYPES = (
    "issue",
    "labels",
    "milestone",
    "author",
    "changes",
    "tested_by",
    "parent",
)

_TS_FORMAT = "%Y-%m-%dT%H:%M:%SZ"
_TS_PATTERN = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$")


class GraphError(Exception):
    """Base class for store errors."""


class UnknownLabel(GraphError):
    pass


class UnknownRelType(GraphError):
    pass


class DanglingEndpoint(GraphError):
    pass


class UnknownNode(GraphError):
    pass


def normalize_timestamp(value: datetime) -> datetime:
    """Convert to UTC and truncate to second precision."""
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc).replace(microsecond=0)


def parse_timestamp(text: str) -> datetime:
    """Parse ISO-8601 text (``Z`` or explicit offset) to a UTC timestamp."""
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    return normalize_timestamp(datetime.fromisoformat(text))


def render_timestamp(value: datetime) -> str:
    return normalize_timestamp(value).strftime(_TS_FORMAT)


def _encode_prop(value: PropertyValue):
    if isinstance(value, datetime):
        return render_timestamp(value)
    return value


def _decode_prop(value):
    if isinstance(value, str) and _TS_PATTERN.match(value):
        return parse_timestamp(value)
    return value


def _check_property_map(properties: dict) -> dict:
    checked: dict[str, PropertyValue] = {}
    for key, value in properties.items():
        if not isinstance(key, str):
            raise GraphError(f"property key must be text, got {key!r}")
        if isinstance(value, datetime):
            value = normalize_timestamp(value)
        elif isinstance(value, list):
            if not all(isinstance(item, str) for item in value):
                raise GraphError(f"list property {key!r} must contain only text")
            value = list(value)
        elif not isinstance(value, (str, int, float, bool)):
            raise GraphError(f"unsupported property type for {key!r}: {type(value).__name__}")
        checked[key] = value
    return checked


def _hashable(value: PropertyValue):
    if isinstance(value, list):
        return tuple(value)
    return value


@dataclass
class Node:
    id: int
    label: str
    properties: dict[str, PropertyValue] = field(default_factory=dict)


@dataclass
class Edge:
    id: int
    rel_type: str
    source: int
    target: int
    properties: dict[str, PropertyValue] = field(default_factory=dict)


class GraphStore:
    """Typed property graph with label, value, and adjacency indexes."""

    def __init__(self) -> None:
        self._nodes: list[Node] = []
        self._edges: list[Edge] = []
        self._label_index: dict[str, list[int]] = {label: [] for label in NODE_LABELS}
        self._value_index: dict[tuple[str, str], dict[object, list[int]]] = {}
        # adjacency: node id -> list of (edge id, other node id)
        self._out: dict[int, list[tuple[int, int]]] = {}
        self._in: dict[int, list[tuple[int, int]]] = {}
        self._digest: str | None = None

    # -- mutation ----------------------------------------------------------

    def add_node(self, label: str, properties: dict | None = None) -> int:
        if label not in NODE_LABELS:
            raise UnknownLabel(f"unknown node label {label!r}")
        props = _check_property_map(properties or {})
        node_id = len(self._nodes)
        self._nodes.append(Node(node_id, label, props))
        self._label_index[label].append(node_id)
        for key, value in props.items():
            bucket = self._value_index.setdefault((label, key), {})
            bucket.setdefault(_hashable(value), []).append(node_id)
        self._out[node_id] = []
        self._in[node_id] = []
        self._digest = None
        return node_id

    def add_edge(
        self,
        source: int,
        rel_type: str,
        target: int,
        properties: dict | None = None,
    ) -> int:
        if rel_type not in EDGE_TYPES:
            raise UnknownRelType(f"unknown edge type {rel_type!r}")
        for endpoint in (source, target):
            if not (0 <= endpoint < len(self._nodes)):
                raise DanglingEndpoint(f"edge endpoint {endpoint} does not exist")
        props = _check_property_map(properties or {})
        edge_id = len(self._edges)
        self._edges.append(Edge(edge_id, rel_type, source, target, props))
        self._out[source].append((edge_id, target))
        self._in[target].append((edge_id, source))
        self._digest = None
        return edge_id

    # -- lookup ------------------------------------------------------------

    def node(self, node_id: int) -> Node:
        if not (0 <= node_id < len(self._nodes)):
            raise UnknownNode(f"no node {node_id}")
        return self._nodes[node_id]

    def edge(self, edge_id: int) -> Edge:
        return self._edges[edge_id]

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def nodes(self) -> Iterable[Node]:
        return iter(self._nodes)

    def edges(self) -> Iterable[Edge]:
        return iter(self._edges)

    def nodes_by_label(self, label: str) -> list[int]:
        if label not in NODE_LABELS:
            raise UnknownLabel(f"unknown node label {label!r}")
        return list(self._label_index[label])

    def find_nodes(self, label: str, key: str, value: PropertyValue) -> list[int]:
        """Node ids with ``label`` whose property ``key`` equals ``value``."""
        if label not in NODE_LABELS:
            raise UnknownLabel(f"unknown node label {label!r}")
        if isinstance(value, datetime):
            value = normalize_timestamp(value)
        bucket = self._value_index.get((label, key), {})
        return list(bucket.get(_hashable(value), []))

    def neighbors(
        self,
        node_id: int,
        rel_type: str | None = None,
        direction: str = "any",
    ) -> list[tuple[int, int]]:
        """Incident ``(edge id, other node id)`` pairs, ascending by edge id.

        ``direction`` is ``"out"``, ``"in"``, or ``"any"``. With ``"any"``,
        a self-loop appears once per orientation.
        """
        if not (0 <= node_id < len(self._nodes)):
            raise UnknownNode(f"no node {node_id}")
        if direction not in ("out", "in", "any"):
            raise ValueError(f"bad direction {direction!r}")
        pairs: list[tuple[int, int]] = []
        if direction in ("out", "any"):
            pairs.extend(self._out[node_id])
        if direction in ("in", "any"):
            pairs.extend(self._in[node_id])
        if rel_type is not None:
            if rel_type not in EDGE_TYPES:
                raise UnknownRelType(f"unknown edge type {rel_type!r}")
            pairs = [(e, n) for e, n in pairs if self._edges[e].rel_type == rel_type]
        return sorted(pairs)

    # -- canonical serialization and versioning -----------------------------

    def _canonical_order(self) -> list[int]:
        """Content-determined node order.

        Primary key is (label, sorted property pairs). Ties between
        identical-content nodes are refined by iterated neighborhood
        signatures, so the order does not depend on insertion order even
        when the store contains twin nodes with different surroundings.
        """
        base: dict[int, str] = {}
        for node in self._nodes:
            doc = [node.label, sorted((k, _encode_prop(v)) for k, v in node.properties.items())]
            base[node.id] = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True)

        refined = dict(base)
        for _ in range(3):
            new_refined: dict[int, str] = {}
            for node in self._nodes:
                signature = sorted(
                    json.dumps(
                        [
                            direction,
                            self._edges[e].rel_type,
                            sorted(
                                (k, _encode_prop(v))
                                for k, v in self._edges[e].properties.items()
                            ),
                            refined[other],
                        ],
                        separators=(",", ":"),
                        ensure_ascii=True,
                    )
                    for direction, pairs in (("out", self._out[node.id]), ("in", self._in[node.id]))
                    for e, other in pairs
                )
                payload = refined[node.id] + "|" + "|".join(signature)
                new_refined[node.id] = hashlib.sha256(payload.encode("utf-8")).hexdigest()
            refined = new_refined

        return sorted(
            (node.id for node in self._nodes),
            key=lambda nid: (base[nid], refined[nid], nid),
        )

    def to_snapshot(self) -> dict:
        """Canonical snapshot document; equal-content stores render equally."""
        order = self._canonical_order()
        position = {node_id: idx for idx, node_id in enumerate(order)}
        nodes = [
            {
                "label": self._nodes[node_id].label,
                "props": {k: _encode_prop(v) for k, v in sorted(self._nodes[node_id].properties.items())},
            }
            for node_id in order
        ]
        edges = sorted(
            (
                {
                    "type": edge.rel_type,
                    "source": position[edge.source],
                    "target": position[edge.target],
                    "props": {k: _encode_prop(v) for k, v in sorted(edge.properties.items())},
                }
                for edge in self._edges
            ),
            key=lambda e: (e["type"], e["source"], e["target"], json.dumps(e["props"], sort_keys=True)),
        )
        return {"nodes": nodes, "edges": edges}

    def snapshot_bytes(self) -> bytes:
        return json.dumps(
            self.to_snapshot(), sort_keys=True, separators=(",", ":"), ensure_ascii=True
        ).encode("utf-8")

    def data_version(self) -> str:
        """Content digest: sha256 hex of the canonical snapshot bytes."""
        if self._digest is None:
            self._digest = hashlib.sha256(self.snapshot_bytes()).hexdigest()
        return self._digest

    @classmethod
    def from_snapshot(cls, document: dict) -> "GraphStore":
        store = cls()
        for entry in document["nodes"]:
            props = {k: _decode_prop(v) for k, v in entry.get("props", {}).items()}
            store.add_node(entry["label"], props)
        for entry in document["edges"]:
            props = {k: _decode_prop(v) for k, v in entry.get("props", {}).items()}
            store.add_edge(entry["source"], entry["type"], entry["target"], props)
        return store

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.snapshot_bytes())

    @classmethod
    def load(cls, path: str | Path) -> "GraphStore":
        return cls.from_snapshot(json.loads(Path(path).read_bytes()))
