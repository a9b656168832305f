"""
Policy file format.

Versioned UTF-8 text. Header lines start with ``# `` and hold ``name=value``
pairs (``format_version``, ``game_id``, ``player``, ``kind`` and, for fixed
rules, ``rule_id``). Body lines are ``<key>\\t<p1>,<p2>,...`` with probabilities
printed at 17 significant digits, keys sorted lexicographically. Extra
tab-separated columns are allowed for other table files (tabular evaluator
checkpoints add a value column).
"""

from __future__ import annotations

import hashlib
from collections.abc import Iterable
from pathlib import Path

import numpy as np

from ..config import ReportConstants
from ..exceptions import ConfigurationError, PolicyFormatError
from ..games import Game, infostate_catalog
from .policy import FixedRulePolicy, Policy, TabularPolicy, UniformPolicy

HEADER_PREFIX = "# "


def format_probability(p: float) -> str:
    return f"{float(p):.{ReportConstants.PROBABILITY_DIGITS}g}"


def format_vector(values: Iterable[float]) -> str:
    return ",".join(format_probability(v) for v in values)


def write_table(header: dict[str, object], rows: Iterable[tuple[str, ...]]) -> str:
    lines = [f"{HEADER_PREFIX}{name}={value}" for name, value in header.items()]
    lines.extend("\t".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def read_table(path: str | Path) -> tuple[dict[str, str], list[list[str]]]:
    """Split a table file into its header dict and body rows."""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"Policy file not found: {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise PolicyFormatError(f"{path}: not UTF-8 text ({e})") from e

    header: dict[str, str] = {}
    rows: list[list[str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.startswith(HEADER_PREFIX):
            if rows:
                raise PolicyFormatError(f"{path}:{lineno}: header line after table body")
            name, sep, value = line[len(HEADER_PREFIX):].partition("=")
            if not sep:
                raise PolicyFormatError(f"{path}:{lineno}: malformed header line '{line}'")
            header[name.strip()] = value.strip()
        elif line.strip() or "\t" in line:
            cols = line.split("\t")
            if len(cols) < 2:
                raise PolicyFormatError(f"{path}:{lineno}: expected '<key>\\t<probabilities>'")
            rows.append(cols)
    return header, rows


def check_header(
    header: dict[str, str], path: str | Path, game: Game, expected_version: int
) -> None:
    version = header.get("format_version")
    if version is None:
        raise PolicyFormatError(f"{path}: missing format_version header")
    if version != str(expected_version):
        raise PolicyFormatError(
            f"{path}: format_version {version} is not supported (expected {expected_version})"
        )
    file_game = header.get("game_id")
    if file_game != game.spec.game_id:
        raise PolicyFormatError(
            f"{path}: file is for game '{file_game}', not '{game.spec.game_id}'"
        )


def parse_vector(text: str, path: str | Path, key: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",")], dtype=np.float64)
    except ValueError as e:
        raise PolicyFormatError(f"{path}: unparsable probabilities at key '{key}'") from e


# ── policies ──────────────────────────────────────────────────────────────────


def serialize(policy: Policy) -> str:
    """Canonical text of a tabular or fixed-rule policy."""
    header: dict[str, object] = {
        "format_version": ReportConstants.POLICY_FORMAT_VERSION,
        "game_id": policy.game.spec.game_id,
        "player": policy.player if policy.player is not None else "any",
        "kind": policy.kind,
    }
    if isinstance(policy, FixedRulePolicy):
        header["rule_id"] = policy.rule_id
        return write_table(header, [])
    if isinstance(policy, UniformPolicy):
        return write_table(header, [])
    if not isinstance(policy, TabularPolicy):
        raise ConfigurationError(f"Cannot save a {policy.kind} policy")
    rows = ((key, format_vector(policy.table[key])) for key in sorted(policy.table))
    return write_table(header, rows)


def save(policy: Policy, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize(policy), encoding="utf-8", newline="\n")
    return path


def load(path: str | Path, game: Game) -> Policy:
    """Load and validate a policy file for ``game``."""
    header, rows = read_table(path)
    check_header(header, path, game, ReportConstants.POLICY_FORMAT_VERSION)

    player_text = header.get("player", "any")
    try:
        player = None if player_text == "any" else int(player_text)
    except ValueError as e:
        raise PolicyFormatError(f"{path}: invalid player header '{player_text}'") from e

    kind = header.get("kind", "tabular")
    if kind == "fixed_rule":
        try:
            return FixedRulePolicy(game, player, header.get("rule_id", ""))
        except ConfigurationError as e:
            raise PolicyFormatError(f"{path}: {e}") from e
    if kind == "uniform":
        return UniformPolicy(game, player)
    if kind != "tabular":
        raise PolicyFormatError(f"{path}: unsupported policy kind '{kind}'")

    catalog = infostate_catalog(game, player) if player is not None and game.spec.traversable else None
    table: dict[str, np.ndarray] = {}
    for cols in rows:
        key = cols[0]
        if key in table:
            raise PolicyFormatError(f"{path}: duplicate key '{key}'")
        probs = parse_vector(cols[1], path, key)
        if catalog is not None:
            legal = catalog.get(key)
            if legal is None:
                raise PolicyFormatError(f"{path}: key '{key}' is not an infostate of player {player}")
            if len(legal) != len(probs):
                raise PolicyFormatError(
                    f"{path}: key '{key}' has {len(probs)} probabilities for {len(legal)} legal actions"
                )
        table[key] = probs
    try:
        return TabularPolicy(game, player, table)
    except ConfigurationError as e:
        raise PolicyFormatError(f"{path}: {e}") from e


def policy_digest(policy: Policy) -> str:
    """sha256 of the canonical serialization (or of the description for unsavable kinds)."""
    try:
        text = serialize(policy)
    except ConfigurationError:
        text = f"{policy.game.spec.game_id}:{policy.player}:{policy.describe()}"
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
