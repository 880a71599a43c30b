"""Command-line interface.

Exit codes: 0 success, 1 any domain error, 2 ledger corruption, 64 usage.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ..attribution.ledger import verify_chain_file
from ..audio.buffer import Key
from ..audio.wav import load_wav, save_wav
from ..agent.session import render_session
from ..blockdb.model import TemporalType, TimbralType
from ..errors import BlockStudioError, CorruptLedger
from .config import Config, load_config
from .state import AppState

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CORRUPT = 2
EXIT_USAGE = 64


@click.group()
def cli():
    """blockstudio: block catalog, music agent sessions, attribution ledger."""


@cli.command()
@click.option("--config", "config_path", type=click.Path(), default=None, help="JSON config file")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
def serve(config_path, host, port):
    """Run the HTTP API server."""
    import logging

    import uvicorn

    from .app import create_app

    logging.basicConfig(level=logging.INFO)
    config = load_config(config_path)
    if host:
        config.host = host
    if port:
        config.port = port
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")


@cli.command()
@click.argument("wav_file", type=click.Path(exists=True))
@click.option("--data-dir", default="./blockstudio-data", show_default=True)
@click.option("--creator", required=True, help="creator identity recorded on the blocks")
@click.option("--kind", type=click.Choice(["stem", "track"]), default="stem", show_default=True)
@click.option("--timbral", type=click.Choice([t.value for t in TimbralType]), default="melody")
@click.option("--temporal", type=click.Choice([t.value for t in TemporalType]), default="verse")
@click.option("--caption", default="")
@click.option("--title", default="untitled")
@click.option("--bpm", type=float, default=None)
@click.option("--key", "key_name", default=None, help="key literal like Amin or F#maj")
@click.option("--stem", "stem_specs", multiple=True, help="track stems as timbral=path")
@click.option("--marker", "marker_specs", multiple=True, help="sections as start:end:label")
def ingest(wav_file, data_dir, creator, kind, timbral, temporal, caption, title,
           bpm, key_name, stem_specs, marker_specs):
    """Ingest a stem or a full track into the catalog."""
    state = AppState(Config(data_dir=data_dir))
    audio = load_wav(Path(wav_file).read_bytes())
    if kind == "stem":
        block = state.catalog.ingest_stem(
            audio,
            timbral=TimbralType(timbral),
            temporal=TemporalType(temporal),
            creator_id=creator,
            caption=caption,
            bpm=bpm,
            key=Key.parse(key_name) if key_name else None,
        )
        click.echo(f"ingested 1 block: {block.block_id}")
        return
    stems = {}
    for spec in stem_specs:
        name, _, path = spec.partition("=")
        if not path:
            raise click.UsageError(f"bad --stem spec: {spec}")
        stems[TimbralType(name)] = load_wav(Path(path).read_bytes())
    markers = []
    for spec in marker_specs:
        parts = spec.split(":")
        if len(parts) != 3:
            raise click.UsageError(f"bad --marker spec: {spec}")
        markers.append((float(parts[0]), float(parts[1]), TemporalType(parts[2])))
    blocks = state.catalog.ingest_track(
        audio,
        creator_id=creator,
        title=title,
        stems=stems or None,
        section_markers=markers or None,
    )
    click.echo(f"ingested {len(blocks)} blocks: " + ", ".join(b.block_id for b in blocks))


@cli.group()
def session():
    """Scripted sessions."""


@session.command("run")
@click.argument("script", type=click.Path(exists=True))
@click.option("--data-dir", default="./blockstudio-data", show_default=True)
@click.option("--catalog", "catalog_dir", type=click.Path(), default=None,
              help="read blocks from this catalog snapshot instead of the data dir")
@click.option("--upload", "uploads", multiple=True, type=click.Path(exists=True),
              help="WAV files available as upload:0, upload:1, ...")
@click.option("--bpm", type=float, default=None)
@click.option("--key", "key_name", default=None)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="write the final render here")
@click.option("--transcript", "transcript_path", type=click.Path(), default=None,
              help="write the turn-by-turn attribution transcript here")
def session_run(script, data_dir, catalog_dir, uploads, bpm, key_name, out_path,
                transcript_path):
    """Execute a DSL script, one command per line (# starts a comment)."""
    state = AppState(Config(data_dir=data_dir), catalog_dir=catalog_dir)
    sess = state.sessions.create(
        bpm=bpm if bpm is not None else state.config.default_bpm,
        key=Key.parse(key_name) if key_name else state.default_key(),
    )
    for path in uploads:
        sess.add_upload(load_wav(Path(path).read_bytes()))
    state.sessions.save(sess)

    transcript: list[str] = []
    for raw_line in Path(script).read_text(encoding="utf-8").splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        response = state.run_turn(sess.session_id, line)
        turn = sess.turns[-1]
        click.echo(f"[turn {turn.turn_id}] {line}")
        click.echo(f"  {response.response_text}")
        transcript.append(f"turn {turn.turn_id}: {line}")
        transcript.append(f"  response: {response.response_text}")
        for entry in response.attribution:
            transcript.append(
                f"  event: block {entry.block_id} by {entry.creator_id} "
                f"({entry.usage_role})"
            )

    if out_path:
        Path(out_path).write_bytes(save_wav(render_session(sess)))
        click.echo(f"render written to {out_path}")
    if transcript_path:
        Path(transcript_path).write_text("\n".join(transcript) + "\n", encoding="utf-8")
        click.echo(f"transcript written to {transcript_path}")
    click.echo(f"session {sess.session_id}: {len(sess.turns)} turns ok")


@cli.group()
def ledger():
    """Ledger audit."""


@ledger.command("verify")
@click.option("--data-dir", default="./blockstudio-data", show_default=True)
def ledger_verify(data_dir):
    """Recompute the whole hash chain."""
    corrupt = verify_chain_file(Path(data_dir) / "ledger.jsonl")
    if corrupt is None:
        click.echo("ok")
        return
    click.echo(f"corrupt at event {corrupt}")
    raise CorruptLedger(f"first corrupt event: {corrupt}")


@cli.command()
@click.option("--data-dir", default="./blockstudio-data", show_default=True)
@click.option("--session", "session_id", required=True)
@click.option("--rule", type=click.Choice(["equal_split", "weighted_pro_rata"]),
              default="weighted_pro_rata", show_default=True)
@click.option("--pool", type=int, required=True, help="pool size in micro-units")
def settle(data_dir, session_id, rule, pool):
    """Settle a session's royalty pool and print the persisted report."""
    state = AppState(Config(data_dir=data_dir))
    stored = state.settlement(session_id, rule, pool)
    click.echo(json.dumps(stored["report"], indent=2, sort_keys=True))


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_ERROR
    except CorruptLedger as exc:
        click.echo(f"ledger corruption: {exc}", err=True)
        return EXIT_CORRUPT
    except BlockStudioError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_ERROR
    except click.exceptions.Abort:
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
