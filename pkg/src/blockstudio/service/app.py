"""HTTP API (/v1): sessions, ingestion, attribution, ledger audit.

Every domain error maps to exactly one (status, code) pair; the mapping is
total over the error taxonomy so module failures never surface as bare 500s.
"""
from __future__ import annotations

import json
import logging

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .. import errors as E
from ..agent.runtime import AgentResponse
from ..agent.session import SessionState
from ..audio.wav import load_wav, save_wav
from ..blockdb.catalog import BlockCatalog
from ..blockdb.model import Block, TemporalType, TimbralType
from ..audio.buffer import Key
from ..agent.session import render_session
from .config import Config
from .state import AppState

logger = logging.getLogger("blockstudio")

ERROR_STATUS: dict[type, int] = {
    E.MalformedWav: 422,
    E.UnsupportedFormat: 415,
    E.MixRateMismatch: 422,
    E.EmptyMixInput: 422,
    E.NonPositiveBpm: 422,
    E.NonMonoInput: 422,
    E.TooShortForTempo: 422,
    E.TooShortForSegmentation: 422,
    E.EmptyBuffer: 422,
    E.EmptyTrack: 422,
    E.UnpitchedTimbrePrototype: 422,
    E.EmptyAudio: 422,
    E.MissingCreator: 422,
    E.SegmentationFailed: 422,
    E.EmptyQuery: 422,
    E.UnknownBlock: 404,
    E.DuplicateToolName: 409,
    E.UnknownTool: 404,
    E.ToolBindingError: 422,
    E.NotImplementedTool: 501,
    E.NoVoicedContent: 422,
    E.NoSyllables: 422,
    E.UnresolvableBlock: 404,
    E.ParseError: 422,
    E.UnknownReference: 404,
    E.StubToolRequired: 501,
    E.NoMatchingBlock: 422,
    E.ToolExecutionError: 422,
    E.NothingToUndo: 422,
    E.EmptySession: 422,
    E.UnknownSession: 404,
    E.ConcurrentTurn: 409,
    E.UnknownBlockInEvent: 404,
    E.LedgerIOFailure: 503,
    E.CorruptLedger: 503,
    E.NoQualifyingEvents: 409,
    E.AuthRequired: 401,
    E.ConfigError: 500,
}


def error_body(exc: E.BlockStudioError) -> dict:
    body = {"code": exc.code, "message": str(exc)}
    if isinstance(exc, E.ParseError):
        body["column"] = exc.column
        body["expected"] = list(exc.expected)
    if isinstance(exc, E.ToolExecutionError):
        body["node_id"] = exc.node_id
    return body


def block_descriptor(block: Block) -> dict:
    return {
        "block_id": block.block_id,
        "creator_id": block.creator_id,
        "source_track_id": block.source_track_id,
        "timbral": block.timbral.value,
        "temporal": block.temporal.value,
        "bpm": block.bpm,
        "key": block.key.name(),
        "bar_length": block.bar_length,
        "caption": block.caption,
        "created_at": block.created_at,
    }


def session_view(session: SessionState) -> dict:
    return {
        "session_id": session.session_id,
        "bpm": session.bpm,
        "key": session.key.name(),
        "tracks": [
            {
                "track_id": t.track_id,
                "label": t.label,
                "duration_seconds": t.audio.duration_seconds,
                "provenance": list(t.provenance),
            }
            for t in session.tracks
        ],
        "upload_count": len(session.uploads),
        "turns": [
            {
                "turn_id": t.turn_id,
                "prompt": t.prompt,
                "command": t.command,
                "status": t.status,
                "response_text": t.response_text,
                "error": t.error,
                "event_ids": list(t.event_ids),
            }
            for t in session.turns
        ],
    }


def turn_view(response: AgentResponse) -> dict:
    body = {
        "response_text": response.response_text,
        "new_track_ids": list(response.new_track_ids),
        "modified_track_ids": list(response.modified_track_ids),
        "removed_track_ids": list(response.removed_track_ids),
        "attribution": [
            {
                "block_id": a.block_id,
                "creator_id": a.creator_id,
                "usage_role": a.usage_role,
            }
            for a in response.attribution
        ],
    }
    if response.transcription is not None:
        body["transcription"] = {
            "bpm": response.transcription.bpm,
            "key": response.transcription.key.name(),
            "notes": [
                {
                    "pitch": n.pitch,
                    "onset_beats": n.onset_beats,
                    "duration_beats": n.duration_beats,
                    "velocity": n.velocity,
                }
                for n in response.transcription.notes
            ],
        }
    return body


def create_app(config: Config | None = None, state: AppState | None = None) -> FastAPI:
    config = config or Config()
    state = state or AppState(config)
    app = FastAPI(title="blockstudio", version="0.1.0")
    app.state.blockstudio = state
    logger.info(config.to_log_line())

    @app.exception_handler(E.BlockStudioError)
    async def handle_domain_error(_request: Request, exc: E.BlockStudioError):
        status = ERROR_STATUS.get(type(exc))
        if status is None:  # fall back to the nearest mapped ancestor
            for klass in type(exc).__mro__:
                if klass in ERROR_STATUS:
                    status = ERROR_STATUS[klass]
                    break
            else:
                status = 500
        return JSONResponse(status_code=status, content=error_body(exc))

    def authed_creator(request: Request) -> str:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise E.AuthRequired("missing bearer token")
        token = header[7:].strip()
        creator = state.config.auth_tokens.get(token)
        if not creator:
            raise E.AuthRequired("unknown token")
        return creator

    # -- blocks ------------------------------------------------------------

    @app.post("/v1/blocks/ingest", status_code=201)
    async def ingest(request: Request):
        creator = authed_creator(request)
        form = await request.form()
        kind = form.get("kind", "stem")
        upload = form.get("file")
        if upload is None:
            raise E.EmptyAudio("missing 'file' part")
        audio = load_wav(await upload.read())

        if kind == "stem":
            timbral = TimbralType(form.get("timbral", "melody"))
            temporal = TemporalType(form.get("temporal", "verse"))
            bpm = float(form["bpm"]) if form.get("bpm") else None
            key = Key.parse(form["key"]) if form.get("key") else None
            block = state.catalog.ingest_stem(
                audio,
                timbral=timbral,
                temporal=temporal,
                creator_id=creator,
                caption=form.get("caption", ""),
                bpm=bpm,
                key=key,
            )
            return {"blocks": [block_descriptor(block)]}

        if kind != "track":
            raise E.UnsupportedFormat(f"unknown ingest kind: {kind}")
        stems = {}
        for field_name, value in form.multi_items():
            if field_name.startswith("stem_") and hasattr(value, "read"):
                stems[TimbralType(field_name[5:])] = load_wav(await value.read())
        markers = None
        if form.get("markers"):
            markers = [
                (float(s), float(e), TemporalType(label))
                for s, e, label in json.loads(form["markers"])
            ]
        captions = None
        if form.get("captions"):
            captions = {
                TimbralType(k): v for k, v in json.loads(form["captions"]).items()
            }
        blocks = state.catalog.ingest_track(
            audio,
            creator_id=creator,
            title=form.get("title", "untitled"),
            stems=stems or None,
            section_markers=markers,
            captions=captions,
        )
        return {"blocks": [block_descriptor(b) for b in blocks]}

    @app.get("/v1/blocks/{block_id}")
    async def get_block(block_id: str):
        return block_descriptor(state.catalog.get_block(block_id))

    @app.get("/v1/blocks")
    async def list_blocks(creator_id: str):
        return {
            "blocks": [
                block_descriptor(b) for b in state.catalog.list_by_creator(creator_id)
            ]
        }

    # -- sessions ------------------------------------------------------------

    @app.post("/v1/sessions", status_code=201)
    async def create_session(request: Request):
        body = {}
        raw = await request.body()
        if raw:
            body = json.loads(raw)
        bpm = float(body.get("bpm", state.config.default_bpm))
        key = Key.parse(body["key"]) if body.get("key") else state.default_key()
        session = state.sessions.create(bpm=bpm, key=key)
        return session_view(session)

    @app.get("/v1/sessions/{session_id}")
    async def get_session(session_id: str):
        return session_view(state.sessions.get(session_id))

    @app.post("/v1/sessions/{session_id}/uploads", status_code=201)
    async def add_upload(session_id: str, request: Request):
        session = state.sessions.get(session_id)
        audio = load_wav(await request.body())
        index = session.add_upload(audio)
        state.sessions.save(session)
        return {"upload_index": index}

    @app.post("/v1/sessions/{session_id}/turns")
    async def run_turn(session_id: str, request: Request):
        body = json.loads(await request.body())
        prompt = body.get("prompt", "")
        response = state.run_turn(session_id, prompt)
        view = turn_view(response)
        view["session"] = session_view(state.sessions.get(session_id))
        return view

    @app.get("/v1/sessions/{session_id}/render")
    async def render(session_id: str):
        session = state.sessions.get(session_id)
        wav = save_wav(render_session(session))
        return Response(content=wav, media_type="audio/wav")

    # -- attribution ------------------------------------------------------------

    @app.get("/v1/attribution/creators/{creator_id}")
    async def creator_analytics(
        creator_id: str, time_from: float | None = None, time_to: float | None = None
    ):
        report = state.creator_report(creator_id, time_from, time_to)
        return report.to_dict()

    @app.get("/v1/attribution/sessions/{session_id}/settlement")
    async def settlement(session_id: str, rule: str = "weighted_pro_rata", pool: int = 0):
        return state.settlement(session_id, rule, pool)

    @app.get("/v1/ledger/verify")
    async def ledger_verify():
        corrupt = state.ledger.verify()
        if corrupt is None:
            return {"status": "ok", "event_count": len(state.ledger)}
        return {"status": "corrupt", "first_corrupt_event_id": corrupt}

    return app
