"""Error taxonomy shared by every blockstudio module.

All domain errors derive from :class:`BlockStudioError` so the service layer
can map the full set onto HTTP statuses without a catch-all 500.
"""


class BlockStudioError(Exception):
    """Base class for every error raised by blockstudio modules."""

    code = "internal_error"


# ---------------------------------------------------------------------------
# audio
# ---------------------------------------------------------------------------

class MalformedWav(BlockStudioError):
    code = "malformed_wav"


class UnsupportedFormat(BlockStudioError):
    code = "unsupported_format"


class MixRateMismatch(BlockStudioError):
    code = "mix_rate_mismatch"


class EmptyMixInput(BlockStudioError):
    code = "empty_mix_input"


class NonPositiveBpm(BlockStudioError):
    code = "non_positive_bpm"


class NonMonoInput(BlockStudioError):
    code = "non_mono_input"


class TooShortForTempo(BlockStudioError):
    code = "too_short_for_tempo"


class TooShortForSegmentation(BlockStudioError):
    code = "too_short_for_segmentation"


class EmptyBuffer(BlockStudioError):
    code = "empty_buffer"


class EmptyTrack(BlockStudioError):
    code = "empty_track"


class UnpitchedTimbrePrototype(BlockStudioError):
    code = "unpitched_timbre_prototype"


# ---------------------------------------------------------------------------
# block catalog
# ---------------------------------------------------------------------------

class EmptyAudio(BlockStudioError):
    code = "empty_audio"


class MissingCreator(BlockStudioError):
    code = "missing_creator"


class SegmentationFailed(BlockStudioError):
    code = "segmentation_failed"


class EmptyQuery(BlockStudioError):
    code = "empty_query"


class UnknownBlock(BlockStudioError):
    code = "unknown_block"


# ---------------------------------------------------------------------------
# tools
# ---------------------------------------------------------------------------

class DuplicateToolName(BlockStudioError):
    code = "duplicate_tool_name"


class UnknownTool(BlockStudioError):
    code = "unknown_tool"


class ToolBindingError(BlockStudioError):
    code = "tool_binding_error"


class NotImplementedTool(BlockStudioError):
    code = "not_implemented_tool"


class NoVoicedContent(BlockStudioError):
    code = "no_voiced_content"


class NoSyllables(BlockStudioError):
    code = "no_syllables"


class UnresolvableBlock(BlockStudioError):
    code = "unresolvable_block"


# ---------------------------------------------------------------------------
# agent
# ---------------------------------------------------------------------------

class ParseError(BlockStudioError):
    """Prompt rejected by the DSL parser.

    Carries the 1-based column of the failure and the token kinds that
    would have been accepted there.
    """

    code = "parse_error"

    def __init__(self, message: str, column: int, expected: tuple[str, ...] = ()):
        super().__init__(message)
        self.column = column
        self.expected = expected


class UnknownReference(BlockStudioError):
    code = "unknown_reference"


class StubToolRequired(BlockStudioError):
    code = "stub_tool_required"


class NoMatchingBlock(BlockStudioError):
    code = "no_matching_block"


class ToolExecutionError(BlockStudioError):
    code = "tool_execution_error"

    def __init__(self, node_id: int, cause: Exception):
        super().__init__(f"node {node_id} failed: {cause}")
        self.node_id = node_id
        self.cause = cause


class NothingToUndo(BlockStudioError):
    code = "nothing_to_undo"


class EmptySession(BlockStudioError):
    code = "empty_session"


class UnknownSession(BlockStudioError):
    code = "unknown_session"


class ConcurrentTurn(BlockStudioError):
    code = "concurrent_turn"


# ---------------------------------------------------------------------------
# attribution
# ---------------------------------------------------------------------------

class UnknownBlockInEvent(BlockStudioError):
    code = "unknown_block_in_event"


class LedgerIOFailure(BlockStudioError):
    code = "ledger_io_failure"


class CorruptLedger(BlockStudioError):
    code = "corrupt_ledger"


class NoQualifyingEvents(BlockStudioError):
    code = "no_qualifying_events"


# ---------------------------------------------------------------------------
# service
# ---------------------------------------------------------------------------

class AuthRequired(BlockStudioError):
    code = "auth_required"


class ConfigError(BlockStudioError):
    code = "config_error"
