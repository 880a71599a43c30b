"""Prompt DSL grammar and error reporting."""
import pytest

from blockstudio.agent import parse_prompt
from blockstudio.agent.dsl import (
    AddCommand,
    GenerateStemCommand,
    ModifyCommand,
    Ref,
    RemoveCommand,
    RenderCommand,
    SetCommand,
    TranscribeCommand,
    UndoCommand,
)
from blockstudio.audio import Key
from blockstudio.blockdb import TemporalType, TimbralType
from blockstudio.errors import ParseError


def test_add_minimal():
    ast = parse_prompt('ADD drums MATCHING "punchy retro"')
    assert isinstance(ast, AddCommand)
    assert ast.timbral == TimbralType.DRUMS
    assert ast.text == "punchy retro"
    assert ast.temporal is None
    assert ast.bpm is None
    assert ast.key is None


def test_add_full_options():
    ast = parse_prompt('ADD bass FOR chorus MATCHING "warm" BPM 95 KEY Amin')
    assert ast.timbral == TimbralType.BASS
    assert ast.temporal == TemporalType.CHORUS
    assert ast.text == "warm"
    assert ast.bpm == 95.0
    assert ast.key == Key(9, "minor")


def test_add_bare_reports_column_and_expected():
    with pytest.raises(ParseError) as err:
        parse_prompt("ADD")
    assert err.value.column == 4
    assert "drums" in err.value.expected


def test_keywords_case_insensitive():
    ast = parse_prompt('add Drums matching "x"')
    assert isinstance(ast, AddCommand)
    assert ast.timbral == TimbralType.DRUMS


def test_generate_worked_example():
    ast = parse_prompt(
        'GENERATE STEM FROM MELODY upload:0 OVER track:1 WITH TIMBRE "retro-pop synth"'
    )
    assert isinstance(ast, GenerateStemCommand)
    assert ast.melody_ref == Ref("upload", 0)
    assert ast.over_ref == Ref("track", 1)
    assert ast.timbre_text == "retro-pop synth"


def test_generate_without_over():
    ast = parse_prompt('GENERATE STEM FROM MELODY upload:2 WITH TIMBRE "piano"')
    assert ast.over_ref is None
    assert ast.melody_ref == Ref("upload", 2)


def test_transcribe():
    ast = parse_prompt("TRANSCRIBE upload:0")
    assert isinstance(ast, TranscribeCommand)
    assert ast.ref == Ref("upload", 0)


def test_modify_negative_gain():
    ast = parse_prompt("MODIFY TRACK 2 GAIN -3")
    assert isinstance(ast, ModifyCommand)
    assert ast.track_id == 2
    assert ast.gain_db == -3.0


def test_remove():
    ast = parse_prompt("REMOVE TRACK 1")
    assert isinstance(ast, RemoveCommand)
    assert ast.track_id == 1


def test_render_undo():
    assert isinstance(parse_prompt("RENDER"), RenderCommand)
    assert isinstance(parse_prompt("undo"), UndoCommand)


def test_set_bpm_and_key():
    ast = parse_prompt("SET BPM 90")
    assert isinstance(ast, SetCommand)
    assert ast.bpm == 90.0
    ast = parse_prompt("SET KEY F#maj")
    assert ast.key == Key(6, "major")


def test_key_literals():
    assert parse_prompt("SET KEY C").key == Key(0, "major")
    assert parse_prompt("SET KEY Amin").key == Key(9, "minor")
    assert parse_prompt("SET KEY Ebmin").key == Key(3, "minor")


def test_errors_carry_one_based_columns():
    with pytest.raises(ParseError) as err:
        parse_prompt('ADD drums "no matching keyword"')
    assert err.value.column == 11
    with pytest.raises(ParseError) as err:
        parse_prompt("BOGUS")
    assert err.value.column == 1
    with pytest.raises(ParseError) as err:
        parse_prompt("")
    assert err.value.column == 1


def test_trailing_garbage_rejected():
    with pytest.raises(ParseError) as err:
        parse_prompt("RENDER please")
    assert err.value.column == 8


def test_unterminated_string_rejected():
    with pytest.raises(ParseError):
        parse_prompt('ADD drums MATCHING "oops')


def test_modify_requires_integer_track():
    with pytest.raises(ParseError):
        parse_prompt("MODIFY TRACK 1.5 GAIN 0")


def test_set_bpm_must_be_positive():
    with pytest.raises(ParseError):
        parse_prompt("SET BPM -10")
