"""The interactive loop runtime: resolve retrievals, execute plans, evolve
session state, and emit attribution events.

Event timing: all of a plan's queries run first, then one event per bound
block is written (durably) before any tool executes.  A retrieval failure
therefore still logs the bindings that did resolve, flagged turn_failed, and
the turn aborts without touching the session's tracks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..attribution.ledger import AttributionEvent, Ledger
from ..attribution.settlement import DEFAULT_ROLE_WEIGHTS
from ..audio.buffer import AudioBuffer, SymbolicTrack
from ..audio.ops import scale
from ..blockdb.catalog import BlockCatalog
from ..blockdb.model import Block, BlockQuery
from ..errors import (
    BlockStudioError,
    NoMatchingBlock,
    ToolExecutionError,
    UnknownReference,
)
from ..tools.registry import ToolRegistry
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
    TaskPlan,
    build_plan,
    topological_order,
)
from .session import SessionState, SessionTrack, Turn, render_session, undo

BPM_TOLERANCE_FRACTION = 0.15
MIN_KEY_COMPATIBILITY = 0.6


@dataclass(frozen=True)
class AttributionEntry:
    block_id: str
    creator_id: str
    usage_role: str


@dataclass(frozen=True)
class AgentResponse:
    """What a turn hands back: templated prose plus structured effects."""

    response_text: str
    new_track_ids: tuple[int, ...] = ()
    modified_track_ids: tuple[int, ...] = ()
    removed_track_ids: tuple[int, ...] = ()
    attribution: tuple[AttributionEntry, ...] = ()
    transcription: SymbolicTrack | None = None


@dataclass
class _TurnScratch:
    events: list[AttributionEvent] = field(default_factory=list)
    blocks: dict[int, Block] = field(default_factory=dict)  # node_id -> block


class Agent:
    """Deterministic parse -> plan -> retrieve -> execute -> apply pipeline."""

    def __init__(
        self,
        catalog: BlockCatalog,
        registry: ToolRegistry,
        ledger: Ledger,
        role_weights: dict[str, float] | None = None,
        bpm_tolerance: float = BPM_TOLERANCE_FRACTION,
        min_key_compatibility: float = MIN_KEY_COMPATIBILITY,
    ):
        self.catalog = catalog
        self.registry = registry
        self.ledger = ledger
        self.role_weights = dict(role_weights or DEFAULT_ROLE_WEIGHTS)
        self.bpm_tolerance = bpm_tolerance
        self.min_key_compatibility = min_key_compatibility

    # -- public surface ------------------------------------------------------

    def run_turn(self, session: SessionState, prompt_text: str) -> AgentResponse:
        """Run one full turn; failed turns leave tracks, bpm and key intact."""
        turn_id = len(session.turns) + 1
        scratch = _TurnScratch()
        command = None
        try:
            ast = parse_prompt(prompt_text)
            command = ast.command
            plan = build_plan(ast, session, self.registry)
            self.resolve_queries(plan, session, turn_id, scratch)
            outputs = self.execute(plan, session, scratch)
            response = self.apply_turn(session, ast, plan, outputs, scratch)
        except Exception as exc:
            session.turns.append(
                Turn(
                    turn_id=turn_id,
                    prompt=prompt_text,
                    command=command,
                    status="failed",
                    error=str(exc),
                    event_ids=tuple(e.event_id for e in scratch.events),
                )
            )
            raise
        session.turns.append(
            Turn(
                turn_id=turn_id,
                prompt=prompt_text,
                command=command,
                status="ok",
                response_text=response.response_text,
                event_ids=tuple(e.event_id for e in scratch.events),
            )
        )
        return response

    # -- retrieval -------------------------------------------------------------

    def _query_for(self, requirement, session: SessionState) -> BlockQuery:
        center = requirement.bpm if requirement.bpm is not None else session.bpm
        return BlockQuery(
            text=requirement.text,
            timbral=requirement.timbral,
            temporal=requirement.temporal,
            bpm_center=center,
            bpm_tolerance=self.bpm_tolerance * center,
            key=requirement.key if requirement.key is not None else session.key,
            min_key_compatibility=self.min_key_compatibility,
            limit=1,
        )

    def resolve_queries(
        self,
        plan: TaskPlan,
        session: SessionState,
        turn_id: int,
        scratch: _TurnScratch,
    ) -> None:
        """Bind every retrieval requirement to its top-1 block.

        All queries run first; one attribution event per successful binding
        is then written before any execution, in node_id order.  If any
        query came back empty the bound events carry turn_failed=True and
        NoMatchingBlock is raised.
        """
        requirement_nodes = sorted(plan.requirements(), key=lambda n: n.node_id)
        bound: list[tuple[PlanNode, Block]] = []
        failed_query: BlockQuery | None = None
        for node in requirement_nodes:
            query = self._query_for(node.requirement, session)
            results = self.catalog.query(query)
            if not results:
                failed_query = query
                break
            block = self.catalog.get_block(results[0].block_id)
            bound.append((node, block))

        for node, block in bound:
            role = node.requirement.usage_role
            event = self.ledger.record_event(
                session_id=session.session_id,
                turn_id=turn_id,
                block_id=block.block_id,
                creator_id=block.creator_id,
                usage_role=role,
                weight=self.role_weights[role],
                turn_failed=failed_query is not None,
            )
            scratch.events.append(event)
            scratch.blocks[node.node_id] = block
            node.requirement.resolved_block_id = block.block_id

        if failed_query is not None:
            raise NoMatchingBlock(
                "no block matches "
                f"text={failed_query.text!r} timbral={failed_query.timbral} "
                f"temporal={failed_query.temporal} "
                f"bpm={failed_query.bpm_center:.0f}+-{failed_query.bpm_tolerance:.0f} "
                f"key={failed_query.key.name()}"
            )

    # -- execution -------------------------------------------------------------

    def _materialize(self, value: Any, session: SessionState, memo: dict[int, Any]) -> Any:
        if isinstance(value, NodeOutput):
            return memo[value.node_id]
        if isinstance(value, Ref):
            if value.kind == "upload":
                try:
                    return session.uploads[value.index]
                except IndexError:
                    raise UnknownReference(f"no such upload: {value}") from None
            try:
                return session.track(value.index).audio
            except KeyError:
                raise UnknownReference(f"no such track: {value}") from None
        return value

    def execute(
        self, plan: TaskPlan, session: SessionState, scratch: _TurnScratch
    ) -> dict[int, Any]:
        """Run tool nodes in stable topological order, memoizing outputs."""
        memo: dict[int, Any] = {}
        for node_id in topological_order(plan):
            node = plan.node(node_id)
            if node.kind == NODE_RETRIEVE:
                memo[node_id] = scratch.blocks[node_id]
                continue
            bindings = {
                slot: self._materialize(value, session, memo)
                for slot, value in node.bindings.items()
            }
            params = self._params_for(node, session)
            try:
                memo[node_id] = self.registry.invoke(node.tool_name, bindings, params)
            except BlockStudioError as exc:
                raise ToolExecutionError(node_id, exc) from exc
        return memo

    def _params_for(self, node: PlanNode, session: SessionState) -> dict[str, Any]:
        if node.tool_name == "midi-transcription":
            return {"bpm": session.bpm}
        if node.tool_name == "stem-generation":
            return {"session_bpm": session.bpm, "session_key": session.key}
        return {}

    # -- application -------------------------------------------------------------

    def apply_turn(
        self,
        session: SessionState,
        ast: PromptAst,
        plan: TaskPlan,
        outputs: dict[int, Any],
        scratch: _TurnScratch,
    ) -> AgentResponse:
        attribution = tuple(
            AttributionEntry(e.block_id, e.creator_id, e.usage_role)
            for e in scratch.events
        )
        provenance = tuple(b.block_id for b in scratch.blocks.values())

        if isinstance(ast, AddCommand):
            audio: AudioBuffer = outputs[plan.output_node]
            block = next(iter(scratch.blocks.values()))
            session.push_undo()
            track_id = session.allocate_track_id()
            label = ast.timbral.value + (
                f" ({ast.temporal.value})" if ast.temporal else ""
            )
            session.tracks.append(
                SessionTrack(track_id, label, audio, provenance)
            )
            text = (
                f"Retrieved '{block.caption}' by {block.creator_id}; "
                f"added {ast.timbral.value} track {track_id} at {session.bpm:g} BPM"
            )
            return AgentResponse(text, new_track_ids=(track_id,), attribution=attribution)

        if isinstance(ast, GenerateStemCommand):
            audio = outputs[plan.output_node]
            block = scratch.blocks[2]
            session.push_undo()
            track_id = session.allocate_track_id()
            session.tracks.append(
                SessionTrack(track_id, "generated stem", audio, provenance)
            )
            text = (
                f"Transcribed {ast.melody_ref}; retrieved '{block.caption}' by "
                f"{block.creator_id}; generated stem"
                + (f" over {ast.over_ref}" if ast.over_ref else "")
                + f" as track {track_id}"
            )
            return AgentResponse(text, new_track_ids=(track_id,), attribution=attribution)

        if isinstance(ast, TranscribeCommand):
            symbolic: SymbolicTrack = outputs[plan.output_node]
            pitches = ", ".join(str(n.pitch) for n in symbolic.notes[:8])
            text = (
                f"Transcribed {ast.ref}: {len(symbolic.notes)} notes "
                f"in {symbolic.key.name()} (pitches {pitches})"
            )
            return AgentResponse(text, transcription=symbolic)

        if isinstance(ast, ModifyCommand):
            track = session.track(ast.track_id)
            session.push_undo()
            factor = 10.0 ** (ast.gain_db / 20.0)
            updated = SessionTrack(
                track.track_id, track.label, scale(track.audio, factor), track.provenance
            )
            session.tracks = [
                updated if t.track_id == ast.track_id else t for t in session.tracks
            ]
            text = f"Applied {ast.gain_db:g} dB gain to track {ast.track_id}"
            return AgentResponse(text, modified_track_ids=(ast.track_id,))

        if isinstance(ast, RemoveCommand):
            session.track(ast.track_id)  # existence re-checked at plan time
            session.push_undo()
            session.tracks = [t for t in session.tracks if t.track_id != ast.track_id]
            return AgentResponse(
                f"Removed track {ast.track_id}", removed_track_ids=(ast.track_id,)
            )

        if isinstance(ast, RenderCommand):
            rendered = render_session(session)
            return AgentResponse(
                f"Rendered {len(session.tracks)} tracks "
                f"({rendered.duration_seconds:.2f} s mix)"
            )

        if isinstance(ast, UndoCommand):
            undo(session)
            return AgentResponse(f"Undid last change; {len(session.tracks)} tracks remain")

        if isinstance(ast, SetCommand):
            if ast.bpm is not None:
                session.bpm = ast.bpm
                return AgentResponse(f"Session BPM set to {ast.bpm:g}")
            session.key = ast.key
            return AgentResponse(f"Session key set to {ast.key.name()}")

        raise ValueError(f"unhandled command: {ast!r}")
