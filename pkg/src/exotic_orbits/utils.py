"""Shared utilities for exotic-orbits."""

import os
import signal
import sys

import numpy as np

# Handle broken pipes (e.g. | head) without stack trace (Unix only)
if hasattr(signal, "SIGPIPE"):
    signal.signal(signal.SIGPIPE, signal.SIG_DFL)

TOOL = "[exotic-orbits]"

SEED_ENV = "EXOTIC_ORBITS_SEED"
DEBUG_ENV = "EXOTIC_ORBITS_DEBUG"
DEFAULT_SEED = 1729


class UsageError(ValueError):
    """Raised when a caller combines arguments that cannot work together."""


class DomainError(ValueError):
    """Raised when an input lies outside the domain of a construction."""


def log(msg):
    """Write a message to stderr with the tool prefix."""
    sys.stderr.write(f"{TOOL} {msg}\n")


def add_common_args(parser):
    """Add common arguments to a CLI parser or subparser."""
    parser.add_argument(
        "--debug",
        action="store_true",
        help=f"Log debug info to stderr (also triggered by {DEBUG_ENV}=1)",
    )
    return parser


def debug_enabled(args=None):
    """Debug is on when the flag is given or the environment asks for it."""
    if args is not None and getattr(args, "debug", False):
        return True
    return os.environ.get(DEBUG_ENV) in ("1", "true", "2")


def default_seed():
    """Seed used when no --seed flag is passed."""
    raw = os.environ.get(SEED_ENV)
    if raw is None or not raw.strip():
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError as e:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from e


def make_rng(seed, *key):
    """Counter-based generator keyed by (seed, *key)."""
    seq = np.random.SeedSequence([int(seed), *(int(k) for k in key)])
    return np.random.Generator(np.random.Philox(seq))


def shard_generators(seed, shards):
    """One independent generator per shard, keyed by (seed, shard index)."""
    if shards < 1:
        raise UsageError("shard count must be at least 1")
    return [make_rng(seed, shard) for shard in range(shards)]


def as_rng(seed_or_rng):
    """Accept either a seed or an existing generator."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return make_rng(seed_or_rng)


def split_count(total, parts):
    """Split `total` samples into `parts` near-equal positive chunks."""
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]
