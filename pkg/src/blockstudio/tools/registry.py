"""Tool registry: uniformly typed, registrable music tools.

Every tool declares named input slots with modalities (text / symbolic /
audio) and one output modality.  Bindings are type-checked before the
implementation runs; an audio slot also accepts a Block, which marks the
binding as attributable.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Callable, Mapping

from ..audio.buffer import AudioBuffer, SymbolicTrack
from ..blockdb.model import Block
from ..errors import DuplicateToolName, ToolBindingError, UnknownTool


class Modality(str, enum.Enum):
    TEXT = "text"
    SYMBOLIC = "symbolic"
    AUDIO = "audio"


@dataclass(frozen=True)
class SlotSpec:
    modality: Modality
    required: bool = True


@dataclass(frozen=True)
class ToolSpec:
    """Name, typed input slots, output modality, human description."""

    name: str
    inputs: Mapping[str, SlotSpec]
    output: Modality
    description: str = ""

    def __post_init__(self):
        if not self.inputs:
            raise ValueError("a tool needs at least one input slot")


def _value_matches(modality: Modality, value: Any) -> bool:
    if modality is Modality.TEXT:
        return isinstance(value, str)
    if modality is Modality.SYMBOLIC:
        return isinstance(value, SymbolicTrack)
    return isinstance(value, (AudioBuffer, Block))


def _output_matches(modality: Modality, value: Any) -> bool:
    # analysis tools may return structured containers of modality values
    if isinstance(value, dict):
        return all(_value_matches(modality, v) for v in value.values())
    if isinstance(value, (list, tuple)):
        return True
    return _value_matches(modality, value)


def check_bindings(spec: ToolSpec, bindings: Mapping[str, Any]) -> None:
    """Reject unknown slots, missing required slots, and modality mismatches."""
    for slot in bindings:
        if slot not in spec.inputs:
            raise ToolBindingError(f"{spec.name}: unknown slot {slot!r}")
    for slot, slot_spec in spec.inputs.items():
        if slot not in bindings or bindings[slot] is None:
            if slot_spec.required:
                raise ToolBindingError(f"{spec.name}: required slot {slot!r} unbound")
            continue
        if not _value_matches(slot_spec.modality, bindings[slot]):
            raise ToolBindingError(
                f"{spec.name}: slot {slot!r} expects {slot_spec.modality.value}, "
                f"got {type(bindings[slot]).__name__}"
            )


class ToolRegistry:
    """Name -> (spec, implementation) map, built once and then read-only."""

    def __init__(self):
        self._tools: dict[str, tuple[ToolSpec, Callable[..., Any]]] = {}

    def register(self, spec: ToolSpec, implementation: Callable[..., Any]) -> None:
        if spec.name in self._tools:
            raise DuplicateToolName(f"tool already registered: {spec.name}")
        self._tools[spec.name] = (spec, implementation)

    def lookup(self, name: str) -> ToolSpec:
        entry = self._tools.get(name)
        if entry is None:
            raise UnknownTool(f"no such tool: {name}")
        return entry[0]

    def is_registered(self, name: str) -> bool:
        return name in self._tools

    def names(self) -> list[str]:
        return sorted(self._tools)

    def __len__(self) -> int:
        return len(self._tools)

    def invoke(
        self,
        name: str,
        bindings: Mapping[str, Any],
        params: Mapping[str, Any] | None = None,
    ) -> Any:
        """Type-check bindings against the tool's slot table, run it, check output.

        ``params`` carries scalar context (bpm, key, seed) outside the
        modality-typed slot system; implementations validate those
        themselves.
        """
        spec = self.lookup(name)
        impl = self._tools[name][1]
        check_bindings(spec, bindings)
        kwargs = {k: v for k, v in bindings.items() if v is not None}
        if params:
            kwargs.update(params)
        result = impl(**kwargs)
        if not _output_matches(spec.output, result):
            raise ToolBindingError(
                f"{name}: implementation returned {type(result).__name__}, "
                f"expected {spec.output.value}"
            )
        return result
