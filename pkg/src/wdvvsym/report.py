"""Check records and report emission (JSON and Markdown)."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Callable

from . import __version__

PASS, FAIL, INCONCLUSIVE, OUT_OF_SCOPE = "pass", "fail", "inconclusive", "out-of-scope"


@dataclass
class CheckRecord:
    id: str
    tag: str
    status: str
    residual: str = ""
    seconds: float = 0.0

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "tag": self.tag,
            "status": self.status,
            "residual": self.residual,
            "seconds": round(self.seconds, 3),
        }


@dataclass
class Report:
    suites: list[str]
    records: list[CheckRecord]
    fixtures_hash: str
    seed: int
    digits: int

    def sorted_records(self) -> list[CheckRecord]:
        return sorted(self.records, key=lambda r: r.id)

    def counts(self) -> dict[str, int]:
        out = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0, OUT_OF_SCOPE: 0}
        for r in self.records:
            out[r.status] = out.get(r.status, 0) + 1
        return out

    @property
    def ok(self) -> bool:
        return all(r.status != FAIL for r in self.records)

    def to_json(self) -> str:
        payload = {
            "tool": "wdvvsym",
            "version": __version__,
            "suites": sorted(self.suites),
            "fixtures_hash": self.fixtures_hash,
            "seed": self.seed,
            "digits": self.digits,
            "counts": self.counts(),
            "checks": [r.as_dict() for r in self.sorted_records()],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def to_markdown(self) -> str:
        lines = [
            "# Verification report",
            "",
            f"- tool: wdvvsym {__version__}",
            f"- suites: {', '.join(sorted(self.suites))}",
            f"- fixtures: `{self.fixtures_hash[:16]}`",
            f"- seed: {self.seed}, digits: {self.digits}",
            "",
            "| check | status | residual | tag |",
            "|-------|--------|----------|-----|",
        ]
        for r in self.sorted_records():
            lines.append(f"| `{r.id}` | {r.status} | {r.residual} | {r.tag} |")
        c = self.counts()
        lines += [
            "",
            f"**{c[PASS]} pass, {c[FAIL]} fail, {c[INCONCLUSIVE]} inconclusive, "
            f"{c[OUT_OF_SCOPE]} out-of-scope.**",
            "",
        ]
        return "\n".join(lines)


class Runner:
    """Collects timed check records; exceptions become failures."""

    def __init__(self, prefix: str):
        self.prefix = prefix
        self.records: list[CheckRecord] = []

    def add(
        self,
        name: str,
        tag: str,
        fn: Callable[[], tuple[str, str]] | Callable[[], bool],
    ) -> CheckRecord:
        t0 = time.monotonic()
        try:
            out = fn()
            if isinstance(out, bool):
                status, residual = (PASS if out else FAIL), ""
            else:
                status, residual = out
        except Exception as exc:  # noqa: BLE001 - recorded, not swallowed
            status, residual = FAIL, f"error: {exc}"
        rec = CheckRecord(f"{self.prefix}/{name}", tag, status, residual, time.monotonic() - t0)
        self.records.append(rec)
        return rec

    def note(self, name: str, tag: str, status: str, residual: str = ""):
        self.records.append(CheckRecord(f"{self.prefix}/{name}", tag, status, residual))
