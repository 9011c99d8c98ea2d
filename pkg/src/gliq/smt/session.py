"""Client side of the solver pipe: subprocess lifecycle, one query at a time,
timeouts, restart-once crash policy, and a shared answer cache."""

from __future__ import annotations

import os
import queue
import shlex
import shutil
import subprocess
import sys
import threading
from dataclasses import dataclass, field


def default_smt_cmd() -> list[str]:
    env = os.environ.get("GLIQ_SMT_CMD")
    if env:
        return shlex.split(env)
    for name, args in (("z3", ["-in"]), ("cvc5", ["--incremental", "--lang", "smt2"])):
        path = shutil.which(name)
        if path:
            return [path] + args
    return [sys.executable, "-m", "gliq.smt.server"]


@dataclass
class SmtConfig:
    cmd: list[str] = field(default_factory=default_smt_cmd)
    timeout_ms: int = 2000


class SolverCrash(Exception):
    pass


class _Reader(threading.Thread):
    def __init__(self, stream):
        super().__init__(daemon=True)
        self.stream = stream
        self.lines: queue.Queue[str | None] = queue.Queue()

    def run(self) -> None:
        for line in self.stream:
            self.lines.put(line.rstrip("\n"))
        self.lines.put(None)


class SmtSession:
    """One solver process; at most one in-flight query.

    Not thread-safe: each worker owns its own session.
    """

    def __init__(self, config: SmtConfig | None = None, cache: dict | None = None):
        self.config = config or SmtConfig()
        self.cache = cache if cache is not None else {}
        self.proc: subprocess.Popen | None = None
        self.reader: _Reader | None = None
        self.query_count = 0
        self.cache_hits = 0
        self._restarted = False

    # -- process management --

    def _ensure(self) -> None:
        if self.proc is not None and self.proc.poll() is None:
            return
        self.proc = subprocess.Popen(
            self.config.cmd,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
        )
        self.reader = _Reader(self.proc.stdout)
        self.reader.start()

    def close(self) -> None:
        if self.proc is not None and self.proc.poll() is None:
            try:
                self.proc.stdin.write("(exit)\n")
                self.proc.stdin.flush()
            except Exception:
                pass
            try:
                self.proc.wait(timeout=1)
            except Exception:
                self.proc.kill()
        self.proc = None
        self.reader = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _kill(self) -> None:
        if self.proc is not None:
            try:
                self.proc.kill()
            except Exception:
                pass
        self.proc = None
        self.reader = None

    # -- querying --

    def raw_check(self, script: str) -> str:
        """Send a self-contained (push ... pop) script ending in check-sat;
        returns 'sat', 'unsat' or 'unknown'."""
        try:
            return self._attempt(script)
        except SolverCrash:
            if self._restarted:
                raise
            self._restarted = True
            self._kill()
            return self._attempt(script)

    def _attempt(self, script: str) -> str:
        self._ensure()
        assert self.proc is not None and self.reader is not None
        try:
            self.proc.stdin.write(script)
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as e:
            raise SolverCrash(str(e))
        deadline = self.config.timeout_ms / 1000.0
        try:
            line = self.reader.lines.get(timeout=deadline)
        except queue.Empty:
            # Timed out: the process state is unknown, replace it.
            self._kill()
            return "unknown"
        if line is None:
            raise SolverCrash("solver closed its output")
        line = line.strip()
        if line in ("sat", "unsat", "unknown"):
            return line
        if line.startswith("(error"):
            # Drain nothing further; treat as a crash so the caller retries once.
            raise SolverCrash(line)
        return "unknown"

    def check(self, key: str, script: str) -> str:
        """Cached check; `key` is the canonical form of the query."""
        hit = self.cache.get(key)
        if hit is not None:
            self.cache_hits += 1
            return hit
        self.query_count += 1
        result = self.raw_check(script)
        if result != "unknown":
            self.cache[key] = result
        return result
