"""The structured prompt DSL.

Grammar (keywords case-insensitive, one command per prompt):

    ADD <timbral> [FOR <temporal>] MATCHING "<text>" [BPM <n>] [KEY <key>]
    GENERATE STEM FROM MELODY <ref> [OVER <ref>] WITH TIMBRE "<text>"
    TRANSCRIBE <ref>
    MODIFY TRACK <n> GAIN <db>
    REMOVE TRACK <n>
    RENDER
    UNDO
    SET BPM <n>
    SET KEY <key>

``<ref>`` is ``upload:<n>`` or ``track:<n>``; key literals look like ``C``,
``Amin``, ``F#maj``.  Parse errors carry the 1-based column and the token
kinds that would have been accepted.  This parser is the seam where a
natural-language front end could later emit the same ASTs.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..audio.buffer import Key
from ..blockdb.model import TemporalType, TimbralType
from ..errors import ParseError

COMMANDS = ("ADD", "GENERATE", "TRANSCRIBE", "MODIFY", "REMOVE", "RENDER", "UNDO", "SET")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>"[^"]*")
  | (?P<ref>(?:upload|track):\d+)
  | (?P<number>-?\d+(?:\.\d+)?)
  | (?P<word>[A-Za-z][A-Za-z0-9_#]*)
    """,
    re.VERBOSE | re.IGNORECASE,
)


@dataclass(frozen=True)
class Ref:
    kind: str  # "upload" | "track"
    index: int

    def __str__(self) -> str:
        return f"{self.kind}:{self.index}"


@dataclass(frozen=True)
class _Token:
    kind: str  # "string" | "ref" | "number" | "word" | "end"
    text: str
    column: int  # 1-based


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}", pos + 1, ("token",)
            )
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    tokens.append(_Token("end", "", len(text) + 1))
    return tokens


# -- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class AddCommand:
    command = "ADD"
    timbral: TimbralType
    text: str
    temporal: TemporalType | None = None
    bpm: float | None = None
    key: Key | None = None


@dataclass(frozen=True)
class GenerateStemCommand:
    command = "GENERATE"
    melody_ref: Ref
    timbre_text: str
    over_ref: Ref | None = None


@dataclass(frozen=True)
class TranscribeCommand:
    command = "TRANSCRIBE"
    ref: Ref


@dataclass(frozen=True)
class ModifyCommand:
    command = "MODIFY"
    track_id: int
    gain_db: float


@dataclass(frozen=True)
class RemoveCommand:
    command = "REMOVE"
    track_id: int


@dataclass(frozen=True)
class RenderCommand:
    command = "RENDER"


@dataclass(frozen=True)
class UndoCommand:
    command = "UNDO"


@dataclass(frozen=True)
class SetCommand:
    command = "SET"
    bpm: float | None = None
    key: Key | None = None


PromptAst = (
    AddCommand
    | GenerateStemCommand
    | TranscribeCommand
    | ModifyCommand
    | RemoveCommand
    | RenderCommand
    | UndoCommand
    | SetCommand
)


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self._tokens = tokens
        self._pos = 0

    def _peek(self) -> _Token:
        return self._tokens[self._pos]

    def _advance(self) -> _Token:
        tok = self._tokens[self._pos]
        if tok.kind != "end":
            self._pos += 1
        return tok

    def _fail(self, expected: tuple[str, ...]) -> ParseError:
        tok = self._peek()
        got = "end of input" if tok.kind == "end" else repr(tok.text)
        return ParseError(
            f"expected {' or '.join(expected)}, got {got}", tok.column, expected
        )

    def _keyword(self, *words: str) -> str:
        tok = self._peek()
        if tok.kind == "word" and tok.text.upper() in words:
            self._advance()
            return tok.text.upper()
        raise self._fail(words)

    def _maybe_keyword(self, word: str) -> bool:
        tok = self._peek()
        if tok.kind == "word" and tok.text.upper() == word:
            self._advance()
            return True
        return False

    def _string(self) -> str:
        tok = self._peek()
        if tok.kind != "string":
            raise self._fail(("quoted text",))
        self._advance()
        return tok.text[1:-1]

    def _number(self) -> float:
        tok = self._peek()
        if tok.kind != "number":
            raise self._fail(("number",))
        self._advance()
        return float(tok.text)

    def _int(self) -> int:
        tok = self._peek()
        if tok.kind != "number" or "." in tok.text or tok.text.startswith("-"):
            raise self._fail(("integer",))
        self._advance()
        return int(tok.text)

    def _ref(self) -> Ref:
        tok = self._peek()
        if tok.kind != "ref":
            raise self._fail(("upload:<n> or track:<n>",))
        self._advance()
        kind, index = tok.text.lower().split(":")
        return Ref(kind, int(index))

    def _timbral(self) -> TimbralType:
        tok = self._peek()
        if tok.kind == "word":
            try:
                value = TimbralType(tok.text.lower())
            except ValueError:
                pass
            else:
                self._advance()
                return value
        raise self._fail(tuple(t.value for t in TimbralType))

    def _temporal(self) -> TemporalType:
        tok = self._peek()
        if tok.kind == "word":
            try:
                value = TemporalType(tok.text.lower())
            except ValueError:
                pass
            else:
                self._advance()
                return value
        raise self._fail(tuple(t.value for t in TemporalType))

    def _key(self) -> Key:
        tok = self._peek()
        if tok.kind == "word":
            try:
                key = Key.parse(tok.text)
            except ValueError:
                pass
            else:
                self._advance()
                return key
        raise self._fail(("key literal like C, Amin, F#maj",))

    def _end(self) -> None:
        tok = self._peek()
        if tok.kind != "end":
            raise self._fail(("end of command",))

    # -- command rules -----------------------------------------------------

    def parse(self) -> PromptAst:
        command = self._keyword(*COMMANDS)
        ast = getattr(self, f"_parse_{command.lower()}")()
        self._end()
        return ast

    def _parse_add(self) -> AddCommand:
        timbral = self._timbral()
        temporal = self._temporal() if self._maybe_keyword("FOR") else None
        self._keyword("MATCHING")
        text = self._string()
        bpm = self._number() if self._maybe_keyword("BPM") else None
        key = self._key() if self._maybe_keyword("KEY") else None
        return AddCommand(timbral=timbral, text=text, temporal=temporal, bpm=bpm, key=key)

    def _parse_generate(self) -> GenerateStemCommand:
        self._keyword("STEM")
        self._keyword("FROM")
        self._keyword("MELODY")
        melody_ref = self._ref()
        over_ref = self._ref() if self._maybe_keyword("OVER") else None
        self._keyword("WITH")
        self._keyword("TIMBRE")
        timbre_text = self._string()
        return GenerateStemCommand(
            melody_ref=melody_ref, timbre_text=timbre_text, over_ref=over_ref
        )

    def _parse_transcribe(self) -> TranscribeCommand:
        return TranscribeCommand(ref=self._ref())

    def _parse_modify(self) -> ModifyCommand:
        self._keyword("TRACK")
        track_id = self._int()
        self._keyword("GAIN")
        gain_db = self._number()
        return ModifyCommand(track_id=track_id, gain_db=gain_db)

    def _parse_remove(self) -> RemoveCommand:
        self._keyword("TRACK")
        return RemoveCommand(track_id=self._int())

    def _parse_render(self) -> RenderCommand:
        return RenderCommand()

    def _parse_undo(self) -> UndoCommand:
        return UndoCommand()

    def _parse_set(self) -> SetCommand:
        which = self._keyword("BPM", "KEY")
        if which == "BPM":
            bpm = self._number()
            if bpm <= 0:
                raise ParseError("BPM must be positive", self._tokens[self._pos - 1].column, ("positive number",))
            return SetCommand(bpm=bpm)
        return SetCommand(key=self._key())


def parse_prompt(text: str) -> PromptAst:
    """Parse one DSL command; raises ParseError with column and expectations."""
    if not text or not text.strip():
        raise ParseError("empty prompt", 1, COMMANDS)
    return _Parser(_tokenize(text)).parse()
