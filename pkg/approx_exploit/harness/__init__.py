"""
Harness Package

Policy sources, head-to-head matches and report emission for the CLI.
"""

from .agents import BUILTIN_SOURCES, build_policy, build_profile, cfr_profile, is_file_source
from .match import MatchReport, play_game, play_match
from .reports import build_report, canonical_json, config_digest, to_jsonable, write_report

__all__ = [
    "BUILTIN_SOURCES",
    "MatchReport",
    "build_policy",
    "build_profile",
    "build_report",
    "canonical_json",
    "cfr_profile",
    "config_digest",
    "is_file_source",
    "play_game",
    "play_match",
    "to_jsonable",
    "write_report",
]
