"""blockstudio: session-based music co-creation over an attributable block
catalog, with a hash-chained usage ledger and exact royalty settlement."""

__version__ = "0.1.0"
