"""Uniformly-typed, registrable music tools."""

from .builtin import (
    CLASSIFICATION,
    LYRIC_TO_MELODY,
    SOURCE_SEPARATION,
    STEM_GENERATION,
    STRUCTURE_ANALYSIS,
    STUB_TOOLS,
    TRANSCRIPTION,
    ClassifierThresholds,
    build_registry,
    count_syllables,
    make_classification,
    make_stem_generation,
    register_builtin_tools,
    register_stub_tools,
    tool_lyric_to_melody,
    tool_source_separation,
    tool_structure_analysis,
    tool_transcription,
)
from .registry import Modality, SlotSpec, ToolRegistry, ToolSpec, check_bindings

__all__ = [
    "CLASSIFICATION",
    "ClassifierThresholds",
    "LYRIC_TO_MELODY",
    "Modality",
    "SOURCE_SEPARATION",
    "STEM_GENERATION",
    "STRUCTURE_ANALYSIS",
    "STUB_TOOLS",
    "SlotSpec",
    "ToolRegistry",
    "ToolSpec",
    "TRANSCRIPTION",
    "build_registry",
    "check_bindings",
    "count_syllables",
    "make_classification",
    "make_stem_generation",
    "register_builtin_tools",
    "register_stub_tools",
    "tool_lyric_to_melody",
    "tool_source_separation",
    "tool_structure_analysis",
    "tool_transcription",
]
