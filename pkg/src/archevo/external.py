"""Child-process evaluator speaking newline-delimited JSON on stdio.

Protocol (one JSON object per line):

    -> {"cmd": "hello"}
    <- {"ok": true, "objectives": ["neg_top1", "madds"]}
    -> {"cmd": "evaluate", "id": 7, "genomes": [[...ints...], ...]}
    <- {"id": 7, "objectives": [[...floats...], ...]}
    -> {"cmd": "adapt", "distribution": [[p, ...], ...], "epochs": 5}
    <- {"ok": true}
    -> {"cmd": "shutdown"}          (child exits 0)

Responses to evaluate requests are matched by id, so a child may answer
outstanding batches in any order.
"""

from __future__ import annotations

import json
import queue
import subprocess
import threading

import numpy as np

from .distribution import AdaptationDistribution
from .evaluators import EvaluationError, Evaluator

_CLOSED = object()


class ExternalEvaluator(Evaluator):
    """Drives a child process through the JSON-lines protocol above.

    ``batch_size`` splits evaluate() calls into concurrently outstanding
    requests (None sends one request per call).  All writes are serialized;
    responses are re-associated by id.
    """

    def __init__(self, cmd, timeout: float = 60.0, batch_size: int | None = None):
        self.cmd = list(cmd)
        self.timeout = timeout
        self.batch_size = batch_size
        self._next_id = 0
        self._write_lock = threading.Lock()
        self._proc = subprocess.Popen(
            self.cmd,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        self._responses: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()
        reply = self._request({"cmd": "hello"})
        if not reply.get("ok") or "objectives" not in reply:
            raise EvaluationError(f"bad hello response: {reply!r}")
        self.objective_names = tuple(reply["objectives"])

    def _read_loop(self):
        assert self._proc.stdout is not None
        for line in self._proc.stdout:
            line = line.strip()
            if not line:
                continue
            try:
                self._responses.put(json.loads(line))
            except json.JSONDecodeError:
                self._responses.put({"malformed": line})
        self._responses.put(_CLOSED)

    def _send(self, payload: dict):
        if self._proc.poll() is not None:
            raise EvaluationError(f"child exited with code {self._proc.returncode}")
        line = json.dumps(payload)
        with self._write_lock:
            assert self._proc.stdin is not None
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()

    def _next_response(self) -> dict:
        try:
            item = self._responses.get(timeout=self.timeout)
        except queue.Empty:
            raise EvaluationError(f"timed out after {self.timeout}s waiting for child")
        if item is _CLOSED:
            raise EvaluationError(
                f"child exited with code {self._proc.poll()} before responding"
            )
        if "malformed" in item:
            raise EvaluationError(f"malformed response line: {item['malformed']!r}")
        return item

    def _request(self, payload: dict) -> dict:
        self._send(payload)
        return self._next_response()

    def evaluate(self, genomes) -> np.ndarray:
        glist = [[int(v) for v in g] for g in genomes]
        if not glist:
            return np.empty((0, self.objective_count))
        size = self.batch_size or len(glist)
        pending: dict[int, slice] = {}
        out: list = [None] * len(glist)
        for start in range(0, len(glist), size):
            chunk = slice(start, min(start + size, len(glist)))
            req_id = self._next_id
            self._next_id += 1
            pending[req_id] = chunk
            self._send({"cmd": "evaluate", "id": req_id, "genomes": glist[chunk]})
        while pending:
            try:
                reply = self._next_response()
            except EvaluationError as err:
                raise EvaluationError(
                    f"{err} (pending evaluate ids: {sorted(pending)})"
                ) from err
            req_id = reply.get("id")
            if req_id not in pending:
                raise EvaluationError(
                    f"unexpected response id {req_id!r} (pending: {sorted(pending)})"
                )
            chunk = pending.pop(req_id)
            values = reply.get("objectives")
            n_expected = chunk.stop - chunk.start
            if not isinstance(values, list) or len(values) != n_expected:
                raise EvaluationError(
                    f"response {req_id} must carry {n_expected} objective rows"
                )
            out[chunk] = values
        return np.asarray(out, dtype=float)

    def adapt(self, distribution: AdaptationDistribution, epochs: int) -> None:
        reply = self._request(
            {"cmd": "adapt", "distribution": distribution.as_rows(), "epochs": int(epochs)}
        )
        if not reply.get("ok"):
            raise EvaluationError(f"adapt rejected: {reply!r}")

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._send({"cmd": "shutdown"})
                self._proc.wait(timeout=self.timeout)
            except Exception:
                self._proc.kill()
                self._proc.wait()
        if self._proc.stdin:
            self._proc.stdin.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
