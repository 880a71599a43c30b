"""Task-plan construction: one DAG of tool and retrieval nodes per prompt.

Retrieval is a first-class node kind so a plan like the stem-generation
workflow reads transcription -> retrieval -> stem-generation with data-flow
edges into the final node.  Administrative commands (MODIFY, REMOVE, RENDER,
UNDO, SET) produce zero-node plans handled directly by the session runtime.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..audio.buffer import Key
from ..blockdb.model import TemporalType, TimbralType
from ..errors import StubToolRequired, UnknownReference
from ..tools.builtin import STEM_GENERATION, STUB_TOOLS, TRANSCRIPTION
from ..tools.registry import ToolRegistry
from .dsl import (
    AddCommand,
    GenerateStemCommand,
    PromptAst,
    Ref,
    TranscribeCommand,
)

NODE_TOOL = "tool"
NODE_RETRIEVE = "retrieve"

RETRIEVAL_PSEUDO_TOOL = "block-retrieval"


@dataclass
class RetrievalRequirement:
    """An abstract asset need, resolved to a concrete block by the runtime."""

    text: str
    timbral: TimbralType | None = None
    temporal: TemporalType | None = None
    bpm: float | None = None
    key: Key | None = None
    usage_role: str = "prompt_audio"
    resolved_block_id: str | None = None


@dataclass(frozen=True)
class NodeOutput:
    """Data-flow edge: the value produced by another node."""

    node_id: int


@dataclass
class PlanNode:
    node_id: int
    kind: str  # NODE_TOOL | NODE_RETRIEVE
    tool_name: str
    bindings: dict[str, Any] = field(default_factory=dict)
    requirement: RetrievalRequirement | None = None


@dataclass
class TaskPlan:
    nodes: list[PlanNode]
    output_node: int | None

    def node(self, node_id: int) -> PlanNode:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        raise KeyError(node_id)

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for node in self.nodes:
            for value in node.bindings.values():
                if isinstance(value, NodeOutput):
                    out.append((value.node_id, node.node_id))
        return sorted(out)

    def requirements(self) -> list[PlanNode]:
        return [n for n in self.nodes if n.kind == NODE_RETRIEVE]

    def validate(self) -> None:
        ids = {n.node_id for n in self.nodes}
        if len(ids) != len(self.nodes):
            raise ValueError("duplicate node ids")
        for src, dst in self.edges():
            if src not in ids or dst not in ids:
                raise ValueError(f"edge references missing node: {src}->{dst}")
        if self.output_node is not None and self.output_node not in ids:
            raise ValueError("output node missing from plan")
        if has_cycle(self):
            raise ValueError("plan graph has a cycle")


def has_cycle(plan: TaskPlan) -> bool:
    adjacency: dict[int, list[int]] = {n.node_id: [] for n in plan.nodes}
    for src, dst in plan.edges():
        adjacency[src].append(dst)
    seen: dict[int, int] = {}  # 0 = visiting, 1 = done

    def visit(node_id: int) -> bool:
        state = seen.get(node_id)
        if state == 0:
            return True
        if state == 1:
            return False
        seen[node_id] = 0
        for nxt in adjacency[node_id]:
            if visit(nxt):
                return True
        seen[node_id] = 1
        return False

    return any(visit(n.node_id) for n in plan.nodes)


def topological_order(plan: TaskPlan) -> list[int]:
    """Kahn's algorithm, picking the lowest node_id among ready nodes."""
    indegree = {n.node_id: 0 for n in plan.nodes}
    adjacency: dict[int, list[int]] = {n.node_id: [] for n in plan.nodes}
    for src, dst in plan.edges():
        adjacency[src].append(dst)
        indegree[dst] += 1
    order = []
    ready = sorted(nid for nid, deg in indegree.items() if deg == 0)
    while ready:
        nid = ready.pop(0)
        order.append(nid)
        for nxt in adjacency[nid]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                ready.append(nxt)
        ready.sort()
    if len(order) != len(plan.nodes):
        raise ValueError("plan graph has a cycle")
    return order


def _check_ref(ref: Ref, session) -> None:
    if ref.kind == "upload":
        if not 0 <= ref.index < len(session.uploads):
            raise UnknownReference(f"no such upload: {ref}")
    else:
        if not any(t.track_id == ref.index for t in session.tracks):
            raise UnknownReference(f"no such track: {ref}")


def _check_tool(name: str, registry: ToolRegistry | None) -> None:
    if name in STUB_TOOLS:
        raise StubToolRequired(f"{name} is not implemented")
    if registry is not None and not registry.is_registered(name):
        raise StubToolRequired(f"{name} is not registered")


def build_plan(ast: PromptAst, session, registry: ToolRegistry | None = None) -> TaskPlan:
    """Construct the command's task plan against the session's references."""
    if isinstance(ast, AddCommand):
        _check_tool(STEM_GENERATION, registry)
        requirement = RetrievalRequirement(
            text=ast.text,
            timbral=ast.timbral,
            temporal=ast.temporal,
            bpm=ast.bpm,
            key=ast.key,
            usage_role="prompt_audio",
        )
        nodes = [
            PlanNode(1, NODE_RETRIEVE, RETRIEVAL_PSEUDO_TOOL, requirement=requirement),
            PlanNode(2, NODE_TOOL, STEM_GENERATION, bindings={"prompt": NodeOutput(1)}),
        ]
        plan = TaskPlan(nodes, output_node=2)
    elif isinstance(ast, GenerateStemCommand):
        _check_tool(TRANSCRIPTION, registry)
        _check_tool(STEM_GENERATION, registry)
        _check_ref(ast.melody_ref, session)
        if ast.over_ref is not None:
            _check_ref(ast.over_ref, session)
        requirement = RetrievalRequirement(
            text=ast.timbre_text, usage_role="prompt_audio"
        )
        bindings: dict[str, Any] = {"prompt": NodeOutput(2), "melody": NodeOutput(1)}
        if ast.over_ref is not None:
            bindings["context"] = ast.over_ref
        nodes = [
            PlanNode(1, NODE_TOOL, TRANSCRIPTION, bindings={"audio": ast.melody_ref}),
            PlanNode(2, NODE_RETRIEVE, RETRIEVAL_PSEUDO_TOOL, requirement=requirement),
            PlanNode(3, NODE_TOOL, STEM_GENERATION, bindings=bindings),
        ]
        plan = TaskPlan(nodes, output_node=3)
    elif isinstance(ast, TranscribeCommand):
        _check_tool(TRANSCRIPTION, registry)
        _check_ref(ast.ref, session)
        nodes = [PlanNode(1, NODE_TOOL, TRANSCRIPTION, bindings={"audio": ast.ref})]
        plan = TaskPlan(nodes, output_node=1)
    else:
        # administrative commands carry no tool nodes
        if hasattr(ast, "track_id"):
            if not any(t.track_id == ast.track_id for t in session.tracks):
                raise UnknownReference(f"no such track: track:{ast.track_id}")
        plan = TaskPlan([], output_node=None)
    plan.validate()
    return plan
