"""Append-only versioned knowledge graph over entities, activities and agents.

Nodes are identified by content (record ids or blob ids), so history cannot
be rewritten silently; registration only ever adds nodes and edges. Edge
kinds split into two groups:

- data-flow kinds ({ingest_from, ingest_to, used_data, generated_model,
  used_code, derived_from, previous_version}) carry provenance and define
  the upstream/downstream closures; restricted to them the graph is a DAG
  and every registration that would close a cycle is rejected up front;
- contextual kinds ({attributed_to, in_environment, member_of_study,
  addresses_task}) annotate activities with agents, environments, studies
  and tasks; they never participate in reachability but are pulled into
  lineage bundles alongside the data-flow closure.

Edge direction is fixed by who declares the relationship, not by data flow:
``used_data`` points activity -> input entity while ``generated_model``
points activity -> output entity, so traversal interprets each kind.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .canonical import canonical_scalar
from .errors import ConflictError, NotFoundError

NODE_CLASSES = ("entity", "activity", "agent")

NODE_CLASS_BY_KIND = {
    "dataset": "entity",
    "model": "entity",
    "code": "entity",
    "environment": "entity",
    "source": "entity",
    "study": "entity",
    "task": "entity",
    "ingest": "activity",
    "process": "activity",
    "analysis": "activity",
    "user": "agent",
}

# kind -> (allowed from node_kinds, allowed to node_kinds); previous_version
# is special-cased (same kind both ends, never agents).
EDGE_ENDPOINTS = {
    "ingest_from": ({"ingest"}, {"source"}),
    "ingest_to": ({"ingest"}, {"dataset"}),
    "used_data": ({"process", "analysis"}, {"dataset"}),
    "derived_from": ({"dataset"}, {"process"}),
    "generated_model": ({"analysis"}, {"model"}),
    "used_code": ({"process", "analysis"}, {"code"}),
    "attributed_to": ({"ingest", "process", "analysis"}, {"user"}),
    "in_environment": ({"ingest", "process", "analysis"}, {"environment"}),
    "member_of_study": ({"analysis"}, {"study"}),
    "addresses_task": ({"analysis"}, {"task"}),
}

# Following the edge in its stored direction moves upstream (toward origins)
UPSTREAM_ALONG = {"ingest_from", "used_data", "used_code", "derived_from", "previous_version"}
# Following the edge in its stored direction moves downstream (toward products)
DOWNSTREAM_ALONG = {"ingest_to", "generated_model"}

TRAVERSAL_KINDS = UPSTREAM_ALONG | DOWNSTREAM_ALONG
CONTEXT_KINDS = {"attributed_to", "in_environment", "member_of_study", "addresses_task"}
PRODUCING_KINDS = {"ingest_to", "generated_model", "derived_from"}


@dataclass(frozen=True)
class LineageNode:
    node_id: str
    node_class: str
    node_kind: str

    def to_doc(self) -> dict:
        return {
            "node_id": self.node_id,
            "node_class": self.node_class,
            "node_kind": self.node_kind,
        }


@dataclass(frozen=True)
class LineageEdge:
    from_id: str
    to_id: str
    kind: str
    split: str | None = None

    def to_doc(self) -> dict:
        doc = {"from": self.from_id, "to": self.to_id, "kind": self.kind}
        if self.split is not None:
            doc["split"] = self.split
        return doc

    def sort_key(self) -> tuple:
        return (self.from_id, self.kind, self.to_id, self.split or "")


@dataclass(frozen=True)
class LineageBundle:
    """Closed provenance neighborhood of one focus node."""

    focus: str
    nodes: tuple[LineageNode, ...]
    edges: tuple[LineageEdge, ...]
    upstream_entities: tuple[str, ...]
    activities: tuple[str, ...]
    agents: tuple[str, ...]
    environments: tuple[str, ...]

    def to_doc(self) -> dict:
        return {
            "focus": self.focus,
            "nodes": [n.to_doc() for n in self.nodes],
            "edges": [e.to_doc() for e in self.edges],
            "upstream_entities": list(self.upstream_entities),
            "activities": list(self.activities),
            "agents": list(self.agents),
            "environments": list(self.environments),
        }


@dataclass(frozen=True)
class VersionDiff:
    a: str
    b: str
    changed_fields: tuple[dict, ...]
    changed_upstream: tuple[dict, ...]

    def to_doc(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "changed_fields": list(self.changed_fields),
            "changed_upstream": list(self.changed_upstream),
        }


class LineageGraph:
    def __init__(self):
        self._nodes: dict[str, LineageNode] = {}
        self._out: dict[str, list[LineageEdge]] = {}
        self._in: dict[str, list[LineageEdge]] = {}
        self._edge_keys: set[tuple] = set()
        self._edge_count = 0

    # -- construction ------------------------------------------------------

    def add_node(self, node_id: str, node_kind: str) -> LineageNode:
        """Idempotent; re-adding with a different kind is a conflict."""
        node_class = NODE_CLASS_BY_KIND.get(node_kind)
        if node_class is None:
            raise ConflictError(f"unknown node kind: {node_kind!r}")
        existing = self._nodes.get(node_id)
        if existing is not None:
            if existing.node_kind != node_kind:
                raise ConflictError(
                    f"node {node_id} already registered as {existing.node_kind}, "
                    f"cannot re-register as {node_kind}"
                )
            return existing
        node = LineageNode(node_id=node_id, node_class=node_class, node_kind=node_kind)
        self._nodes[node_id] = node
        self._out[node_id] = []
        self._in[node_id] = []
        return node

    def add_edge(self, from_id: str, to_id: str, kind: str, split: str | None = None) -> None:
        """Idempotent on identical edges; endpoints and kind rules enforced."""
        src = self._nodes.get(from_id)
        dst = self._nodes.get(to_id)
        if src is None or dst is None:
            missing = from_id if src is None else to_id
            raise ConflictError(f"edge endpoint not in graph: {missing}")
        if kind == "previous_version":
            if src.node_kind != dst.node_kind or src.node_class == "agent":
                raise ConflictError(
                    f"previous_version must link two {src.node_kind} nodes of the same kind"
                )
        else:
            rule = EDGE_ENDPOINTS.get(kind)
            if rule is None:
                raise ConflictError(f"unknown edge kind: {kind!r}")
            from_kinds, to_kinds = rule
            if src.node_kind not in from_kinds or dst.node_kind not in to_kinds:
                raise ConflictError(
                    f"{kind} edge cannot link {src.node_kind} -> {dst.node_kind}"
                )
        key = (from_id, to_id, kind, split)
        if key in self._edge_keys:
            return
        edge = LineageEdge(from_id=from_id, to_id=to_id, kind=kind, split=split)
        self._edge_keys.add(key)
        self._out[from_id].append(edge)
        self._in[to_id].append(edge)
        self._edge_count += 1

    # -- inspection --------------------------------------------------------

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._nodes

    def node(self, node_id: str) -> LineageNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise NotFoundError(f"no such node: {node_id}") from None

    def node_ids(self) -> list[str]:
        return sorted(self._nodes)

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def out_edges(self, node_id: str) -> tuple[LineageEdge, ...]:
        return tuple(self._out.get(node_id, ()))

    def in_edges(self, node_id: str) -> tuple[LineageEdge, ...]:
        return tuple(self._in.get(node_id, ()))

    def edges_sorted(self) -> list[LineageEdge]:
        out = [e for edges in self._out.values() for e in edges]
        return sorted(out, key=LineageEdge.sort_key)

    def induced_edges(self, node_ids: set[str]) -> list[LineageEdge]:
        out = []
        for nid in node_ids:
            for edge in self._out.get(nid, ()):
                if edge.to_id in node_ids:
                    out.append(edge)
        return sorted(out, key=LineageEdge.sort_key)

    # -- traversal ---------------------------------------------------------

    def _step_upstream(self, node_id: str) -> Iterable[str]:
        for edge in self._out[node_id]:
            if edge.kind in UPSTREAM_ALONG:
                yield edge.to_id
        for edge in self._in[node_id]:
            if edge.kind in DOWNSTREAM_ALONG:
                yield edge.from_id

    def _step_downstream(self, node_id: str) -> Iterable[str]:
        for edge in self._out[node_id]:
            if edge.kind in DOWNSTREAM_ALONG:
                yield edge.to_id
        for edge in self._in[node_id]:
            if edge.kind in UPSTREAM_ALONG:
                yield edge.from_id

    def _closure(self, node_id: str, step) -> set[str]:
        self.node(node_id)
        seen = {node_id}
        frontier = [node_id]
        while frontier:
            current = frontier.pop()
            for neighbor in step(current):
                if neighbor not in seen:
                    seen.add(neighbor)
                    frontier.append(neighbor)
        seen.discard(node_id)
        return seen

    def upstream(self, node_id: str) -> set[str]:
        """Everything the node was generated from, excluding the node."""
        return self._closure(node_id, self._step_upstream)

    def downstream(self, node_id: str) -> set[str]:
        """Everything generated from the node, excluding the node."""
        return self._closure(node_id, self._step_downstream)

    def would_cycle(self, inputs: set[str], outputs: set[str]) -> bool:
        """True if wiring a new activity from inputs to outputs closes a loop.

        The graph is a DAG before the call and every new data-flow edge is
        incident to the new activity, so a cycle exists exactly when some
        declared output already reaches a declared input (or is one).
        """
        known_inputs = {n for n in inputs if n in self._nodes}
        if not known_inputs:
            return False
        for out_id in outputs:
            if out_id in known_inputs:
                return True
            if out_id in self._nodes and self.downstream(out_id) & known_inputs:
                return True
        return False

    # -- producers and versions --------------------------------------------

    def producer_of(self, node_id: str) -> str | None:
        """The single activity that generated an entity version, if any."""
        self.node(node_id)
        for edge in self._in[node_id]:
            if edge.kind in ("ingest_to", "generated_model"):
                return edge.from_id
        for edge in self._out[node_id]:
            if edge.kind == "derived_from":
                return edge.to_id
        return None

    def version_predecessor(self, node_id: str) -> str | None:
        for edge in self._out[node_id]:
            if edge.kind == "previous_version":
                return edge.to_id
        return None

    def version_successor(self, node_id: str) -> str | None:
        for edge in self._in[node_id]:
            if edge.kind == "previous_version":
                return edge.from_id
        return None

    def version_chain(self, node_id: str) -> list[str]:
        """Full chain containing the node, oldest first."""
        self.node(node_id)
        oldest = node_id
        while True:
            prev = self.version_predecessor(oldest)
            if prev is None:
                break
            oldest = prev
        chain = [oldest]
        while True:
            nxt = self.version_successor(chain[-1])
            if nxt is None:
                break
            chain.append(nxt)
        return chain

    # -- bundles -----------------------------------------------------------

    def bundle(self, focus: str) -> LineageBundle:
        """Upstream closure of focus plus context attached to its activities."""
        closure = self.upstream(focus)
        members = closure | {focus}
        for node_id in list(members):
            if self._nodes[node_id].node_class != "activity":
                continue
            for edge in self._out[node_id]:
                if edge.kind in CONTEXT_KINDS:
                    members.add(edge.to_id)
        nodes = tuple(self._nodes[n] for n in sorted(members))
        entities, activities, agents, environments = [], [], [], []
        for node in nodes:
            if node.node_id == focus:
                continue
            if node.node_class == "agent":
                agents.append(node.node_id)
            elif node.node_class == "activity":
                activities.append(node.node_id)
            elif node.node_kind == "environment":
                environments.append(node.node_id)
            else:
                entities.append(node.node_id)
        return LineageBundle(
            focus=focus,
            nodes=nodes,
            edges=tuple(self.induced_edges(members)),
            upstream_entities=tuple(entities),
            activities=tuple(activities),
            agents=tuple(agents),
            environments=tuple(environments),
        )


def diff_versions(graph: LineageGraph, a: str, b: str, record_fields) -> VersionDiff:
    """Field-wise and closure-wise difference between two same-kind nodes.

    ``record_fields(node_id)`` returns the record's canonical payload dict,
    or None for nodes without records (blobs). Field values are compared and
    reported as canonical JSON scalars. Upstream differences are paired when
    the differing nodes belong to the same version chain.
    """
    node_a = graph.node(a)
    node_b = graph.node(b)
    if node_a.node_kind != node_b.node_kind:
        raise ConflictError(
            f"cannot diff {node_a.node_kind} against {node_b.node_kind}"
        )
    changed_fields: list[dict] = []
    if a != b:
        fields_a = record_fields(a) or {}
        fields_b = record_fields(b) or {}
        for key in sorted(set(fields_a) | set(fields_b)):
            va = fields_a.get(key)
            vb = fields_b.get(key)
            if va != vb:
                changed_fields.append(
                    {
                        "field": key,
                        "value_a": canonical_scalar(va) if key in fields_a else None,
                        "value_b": canonical_scalar(vb) if key in fields_b else None,
                    }
                )

    changed_upstream: list[dict] = []
    if a != b:
        # Members of a's and b's own version chains are not "upstream changes";
        # when b succeeds a, a is always inside up(b) through the version edge.
        own_chain = set(graph.version_chain(a)) | set(graph.version_chain(b))
        up_a = graph.upstream(a) - own_chain
        up_b = graph.upstream(b) - own_chain
        # A closure that holds version n of a family also holds n's
        # predecessors, so each side's effective member of a family is its
        # newest one; report the families whose effective members differ.
        families: dict[str, list[str]] = {}
        for nid in up_a | up_b:
            chain = graph.version_chain(nid)
            families.setdefault(chain[0], chain)
        for chain in families.values():
            eff_a = next((nid for nid in reversed(chain) if nid in up_a), None)
            eff_b = next((nid for nid in reversed(chain) if nid in up_b), None)
            if eff_a != eff_b:
                changed_upstream.append({"a": eff_a, "b": eff_b})
        changed_upstream.sort(key=lambda e: (e["a"] or "", e["b"] or ""))

    return VersionDiff(
        a=a,
        b=b,
        changed_fields=tuple(changed_fields),
        changed_upstream=tuple(changed_upstream),
    )
