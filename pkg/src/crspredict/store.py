"""Append-only expert-label store with save-and-resume sessions.

Every submit or revision appends one immutable JSON event to the log file;
the in-memory state (latest call per rater/case, full history, session
cursors) is a pure fold over that log, so replaying the file from empty
reconstructs the exact store. A single lock serializes writers; reads see
the latest committed event.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

from .errors import MalformedConfidence, UnknownCase


@dataclass(frozen=True)
class LabelEvent:
    kind: str  # "label" | "session"
    rater_id: str
    case_id: str = ""
    call: int = -1
    confidence: int = 0
    revision: int = 0
    cursor: int = -1
    timestamp: float = 0.0


class LabelStore:
    def __init__(self, path: str | Path, known_cases: Optional[set[str]] = None):
        self.path = Path(path)
        self.known_cases = known_cases
        self._lock = threading.Lock()
        self._events: list[LabelEvent] = []
        self._history: dict[tuple[str, str], list[LabelEvent]] = {}
        self._cursors: dict[str, int] = {}
        if self.path.exists():
            with self.path.open("r", encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        self._apply(LabelEvent(**json.loads(line)), persist=False)

    def _apply(self, event: LabelEvent, persist: bool) -> None:
        if persist:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(asdict(event), sort_keys=True) + "\n")
                fh.flush()
        self._events.append(event)
        if event.kind == "label":
            self._history.setdefault((event.rater_id, event.case_id), []).append(event)
        else:
            self._cursors[event.rater_id] = event.cursor

    def submit(
        self,
        rater_id: str,
        case_id: str,
        call: int,
        confidence: int,
        timestamp: Optional[float] = None,
    ) -> LabelEvent:
        """Append a new label or a revision of an earlier one."""
        if call not in (0, 1):
            raise ValueError(f"call must be 0 or 1, got {call}")
        if not isinstance(confidence, int) or not 1 <= confidence <= 5:
            raise MalformedConfidence(f"confidence {confidence} outside 1..5")
        if self.known_cases is not None and case_id not in self.known_cases:
            raise UnknownCase(case_id)
        with self._lock:
            revision = len(self._history.get((rater_id, case_id), [])) + 1
            event = LabelEvent(
                kind="label",
                rater_id=rater_id,
                case_id=case_id,
                call=call,
                confidence=confidence,
                revision=revision,
                timestamp=time.time() if timestamp is None else timestamp,
            )
            self._apply(event, persist=True)
            return event

    def history(self, rater_id: str, case_id: str) -> list[LabelEvent]:
        return list(self._history.get((rater_id, case_id), []))

    def latest(self, rater_id: Optional[str] = None) -> list[LabelEvent]:
        """Latest revision per (rater, case), optionally for one rater."""
        out = []
        for (rater, _case), events in sorted(self._history.items()):
            if rater_id is None or rater == rater_id:
                out.append(events[-1])
        return out

    def latest_by_case(self) -> dict[str, list[LabelEvent]]:
        out: dict[str, list[LabelEvent]] = {}
        for event in self.latest():
            out.setdefault(event.case_id, []).append(event)
        return out

    def set_cursor(self, rater_id: str, cursor: int) -> None:
        with self._lock:
            self._apply(
                LabelEvent(kind="session", rater_id=rater_id, cursor=int(cursor),
                           timestamp=time.time()),
                persist=True,
            )

    def get_cursor(self, rater_id: str) -> int:
        return self._cursors.get(rater_id, 0)

    def state_digest(self) -> dict:
        """Canonical view of the resolved state, used to compare replays."""
        return {
            "latest": [
                [e.rater_id, e.case_id, e.call, e.confidence, e.revision]
                for e in self.latest()
            ],
            "history_lengths": {
                f"{r}/{c}": len(ev) for (r, c), ev in sorted(self._history.items())
            },
            "cursors": dict(sorted(self._cursors.items())),
        }

    def event_count(self) -> int:
        return len(self._events)

    def write_snapshot(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            json.dump(self.state_digest(), fh, sort_keys=True, indent=2)
