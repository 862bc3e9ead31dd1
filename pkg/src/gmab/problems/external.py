"""Black-box simulator in a child process, spoken to over a line protocol on stdio.

    child  -> parent   GMAB/1 <D> <LB_1> ... <LB_D> <UB_1> ... <UB_D>
    parent -> child    EVAL <x_1> ... <x_D>
    child  -> parent   OBS <float>
    parent -> child    END

All lines are ASCII and newline terminated. Anything else is a protocol error.
"""
from __future__ import annotations

import math
import os
import selectors
import shlex
import subprocess
from typing import Optional, Sequence

from ..core import Direction, EvaluationError, SearchSpace, validate

PROTOCOL = "GMAB/1"


def parse_handshake(line: str) -> SearchSpace:
    tokens = line.split()
    if not tokens or tokens[0] != PROTOCOL:
        raise EvaluationError(f"bad handshake {line!r}", payload=line)
    try:
        D = int(tokens[1])
        numbers = [int(t) for t in tokens[2:]]
    except (IndexError, ValueError):
        raise EvaluationError(f"bad handshake {line!r}", payload=line) from None
    if D < 1 or len(numbers) != 2 * D:
        raise EvaluationError(f"handshake declares D={D} but carries {len(numbers)} bounds", payload=line)
    try:
        return SearchSpace(tuple(numbers[:D]), tuple(numbers[D:]))
    except ValueError as exc:
        raise EvaluationError(f"handshake bounds invalid: {exc}", payload=line) from exc


def format_request(x: Sequence[int]) -> str:
    return "EVAL " + " ".join(str(int(v)) for v in x) + "\n"


def parse_reply(line: str) -> float:
    tokens = line.split()
    if len(tokens) != 2 or tokens[0] != "OBS":
        raise EvaluationError(f"malformed reply {line!r}", payload=line)
    try:
        value = float(tokens[1])
    except ValueError:
        raise EvaluationError(f"non-numeric observation in {line!r}", payload=line) from None
    if not math.isfinite(value):
        raise EvaluationError(f"non-finite observation in {line!r}", payload=line)
    return value


class ExternalSimulator:
    """Problem backed by an external process. Single owner; close() when done.

    The child draws its own randomness, so the noise stream handed to
    ``simulate`` is ignored.
    """

    def __init__(self, command, timeout: float = 30.0, direction=Direction.MINIMIZE,
                 name: str = "external", optimum: Optional[float] = None):
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        self.command = argv
        self.timeout = timeout
        self.direction = Direction(direction)
        self.name = name
        self.optimum = optimum
        self._proc = subprocess.Popen(
            argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            bufsize=0,
        )
        self._buffer = b""
        self._selector = selectors.DefaultSelector()
        self._selector.register(self._proc.stdout, selectors.EVENT_READ)
        try:
            self.space = parse_handshake(self._readline())
        except Exception:
            self.close()
            raise

    def _readline(self) -> str:
        while b"\n" not in self._buffer:
            if not self._selector.select(self.timeout):
                raise EvaluationError(f"simulator did not answer within {self.timeout}s", payload=self._buffer)
            chunk = os.read(self._proc.stdout.fileno(), 4096)
            if not chunk:
                code = self._proc.poll()
                raise EvaluationError(f"simulator closed its output (exit code {code})", payload=self._buffer)
            self._buffer += chunk
        line, _, self._buffer = self._buffer.partition(b"\n")
        try:
            return line.decode("ascii")
        except UnicodeDecodeError:
            raise EvaluationError(f"non-ASCII reply {line!r}", payload=line) from None

    def simulate(self, x: Sequence[int], rng=None) -> float:
        if not validate(self.space, x):
            raise EvaluationError(f"{tuple(x)} outside the declared space", payload=tuple(x))
        try:
            self._proc.stdin.write(format_request(x).encode("ascii"))
        except (BrokenPipeError, OSError, ValueError) as exc:
            raise EvaluationError(f"cannot write to simulator: {exc}", payload=exc) from exc
        return parse_reply(self._readline())

    def true_value(self, x) -> None:
        return None

    def close(self) -> None:
        proc = self._proc
        if proc.poll() is None:
            try:
                proc.stdin.write(b"END\n")
                proc.stdin.close()
            except (BrokenPipeError, OSError, ValueError):
                pass
            try:
                proc.wait(timeout=self.timeout)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()
        self._selector.close()
        if proc.stdout:
            proc.stdout.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
