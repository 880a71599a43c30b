"""Session-based interactive loop: DSL, planner, executor, session state."""

from .dsl import (
    AddCommand,
    GenerateStemCommand,
    ModifyCommand,
    PromptAst,
    Ref,
    RemoveCommand,
    RenderCommand,
    SetCommand,
    TranscribeCommand,
    UndoCommand,
    parse_prompt,
)
from .planner import (
    NODE_RETRIEVE,
    NODE_TOOL,
    NodeOutput,
    PlanNode,
    RetrievalRequirement,
    TaskPlan,
    build_plan,
    has_cycle,
    topological_order,
)
from .runtime import Agent, AgentResponse, AttributionEntry
from .session import (
    DEFAULT_BPM,
    DEFAULT_KEY,
    SessionState,
    SessionTrack,
    Turn,
    render_session,
    undo,
)

__all__ = [
    "AddCommand",
    "Agent",
    "AgentResponse",
    "AttributionEntry",
    "DEFAULT_BPM",
    "DEFAULT_KEY",
    "GenerateStemCommand",
    "ModifyCommand",
    "NODE_RETRIEVE",
    "NODE_TOOL",
    "NodeOutput",
    "PlanNode",
    "PromptAst",
    "Ref",
    "RemoveCommand",
    "RenderCommand",
    "RetrievalRequirement",
    "SessionState",
    "SessionTrack",
    "SetCommand",
    "TaskPlan",
    "TranscribeCommand",
    "Turn",
    "UndoCommand",
    "build_plan",
    "has_cycle",
    "parse_prompt",
    "render_session",
    "topological_order",
    "undo",
]
