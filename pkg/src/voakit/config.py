"""Run configuration: flat key = value files plus command-line overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, asdict

from .errors import ParameterError


def parse_range(text):
    """Parse "a..b" or a single integer into an inclusive (a, b) pair."""
    text = str(text).strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        a, b = int(lo), int(hi)
    else:
        a = b = int(text)
    if b < a:
        raise ParameterError(f"empty range {text!r}")
    return a, b


@dataclass
class SuiteConfig:
    voa: str = "heisenberg"
    central_charge: str = "1/2"
    cutoff: int = 6
    margin: int = 4
    m_range: tuple = (0, 1)
    n_range: tuple = (0, 1)
    p_range: tuple = (-2, 2)
    corpus_weight: int = 4
    suites: tuple = ("all",)
    report_path: str = ""
    threads: int = 1
    retry_ceiling: int = 10
    inject_fail: bool = False

    def validate(self):
        if self.voa not in ("heisenberg", "virasoro"):
            raise ParameterError(f"unknown voa kind {self.voa!r}")
        if self.cutoff < self.corpus_weight:
            raise ParameterError("cutoff must be at least the corpus weight bound")
        if self.margin < 0:
            raise ParameterError("margin must be nonnegative")
        for a, b in (self.m_range, self.n_range):
            if a < 0:
                raise ParameterError("m and n ranges must be nonnegative")
        return self

    def to_dict(self):
        d = asdict(self)
        d["m_range"] = list(self.m_range)
        d["n_range"] = list(self.n_range)
        d["p_range"] = list(self.p_range)
        d["suites"] = list(self.suites)
        return d


_KEYS = {
    "voa": str,
    "central_charge": str,
    "cutoff": int,
    "margin": int,
    "m_range": parse_range,
    "n_range": parse_range,
    "p_range": parse_range,
    "corpus_weight": int,
    "threads": int,
    "retry_ceiling": int,
}


def load_config_file(path):
    """Read flat ``key = value`` lines; '#' starts a comment."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key = value")
            key, val = (part.strip() for part in line.split("=", 1))
            if key not in _KEYS:
                raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _KEYS[key](val)
    return values


def thread_count(explicit=None):
    """Worker cap: explicit flag wins, then VOAKIT_THREADS, then 1."""
    if explicit:
        return max(1, int(explicit))
    env = os.environ.get("VOAKIT_THREADS", "")
    if env.strip():
        try:
            return max(1, int(env))
        except ValueError:
            raise ParameterError(f"VOAKIT_THREADS={env!r} is not an integer")
    return 1
