"""Bits shared by both node kinds: the error type that crosses the wire
as a machine-readable code and the append-only event log with atomic
snapshot support."""

import json
import os

from ..wire import b64, unb64  # noqa: F401  (re-exported for node modules)


class NodeError(Exception):
    """Protocol-level refusal; serialized as {"error": code, ...extra}."""

    def __init__(self, code, status=400, extra=None):
        super().__init__(code)
        self.code = code
        self.status = status
        self.extra = extra or {}

    def body(self):
        return {"error": self.code, **self.extra}


def write_atomic(path, data):
    """Write-temp-then-rename so readers never see a half-written file."""
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


class EventLog:
    """Append-only JSONL journal, fsynced per event so an accepted event
    survives a crash that follows it."""

    def __init__(self, path):
        self.path = path
        self._fh = None
        self.seq = 0

    def replay(self):
        """Yields (seq, event) for every complete line already on disk.

        A torn final line (crash mid-write) is ignored: its event was
        never acknowledged, so dropping it is the correct recovery.
        """
        if not os.path.exists(self.path):
            return
        with open(self.path, "rb") as fh:
            raw = fh.read()
        for line in raw.split(b"\n"):
            if not line:
                continue
            try:
                event = json.loads(line)
            except json.JSONDecodeError:
                continue
            self.seq = max(self.seq, event.get("seq", 0))
            yield event["seq"], event

    def append(self, event):
        if self._fh is None:
            self._fh = open(self.path, "a", encoding="utf-8")
        self.seq += 1
        record = {"seq": self.seq, **event}
        self._fh.write(json.dumps(record, separators=(",", ":")) + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())
        return self.seq

    def close(self):
        if self._fh is not None:
            self._fh.close()
            self._fh = None
