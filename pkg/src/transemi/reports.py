"""Structured pass/fail reports emitted by every checker in the package."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


@dataclass
class CheckResult:
    """Verdict of a single named check.

    A failing result must carry at least one witness so that reports are
    actionable; `Report.add` enforces this.
    """

    check_id: str
    passed: bool
    witnesses: list[Any] = field(default_factory=list)
    detail: str = ""
    seconds: float | None = None


class Report:
    """Ordered collection of check results with text and machine renderings.

    Serialized output omits timings by default so that identical inputs
    produce byte-identical reports.
    """

    def __init__(self, title: str = ""):
        self.title = title
        self.results: list[CheckResult] = []

    def add(
        self,
        check_id: str,
        passed: bool,
        witnesses: list[Any] | None = None,
        detail: str = "",
        seconds: float | None = None,
    ) -> CheckResult:
        witnesses = list(witnesses or [])
        if not passed and not witnesses:
            raise ValueError(f"failing check {check_id!r} needs a witness")
        result = CheckResult(check_id, passed, witnesses, detail, seconds)
        self.results.append(result)
        return result

    def extend(self, other: "Report", prefix: str = "") -> None:
        for r in other.results:
            cid = f"{prefix}{r.check_id}" if prefix else r.check_id
            self.results.append(CheckResult(cid, r.passed, r.witnesses, r.detail, r.seconds))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def __getitem__(self, check_id: str) -> CheckResult:
        for r in self.results:
            if r.check_id == check_id:
                return r
        raise KeyError(check_id)

    def to_text(self, include_timings: bool = False) -> str:
        lines = []
        if self.title:
            lines.append(f"== {self.title} ==")
        for r in self.results:
            tag = "PASS" if r.passed else "FAIL"
            line = f"[{tag}] {r.check_id}"
            if r.detail:
                line += f"  {r.detail}"
            if include_timings and r.seconds is not None:
                line += f"  ({r.seconds:.3f}s)"
            lines.append(line)
            if not r.passed:
                shown = r.witnesses[:5]
                for w in shown:
                    lines.append(f"       witness: {w}")
                if len(r.witnesses) > len(shown):
                    lines.append(f"       ... {len(r.witnesses) - len(shown)} more")
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(f"verdict: {verdict}")
        return "\n".join(lines)

    def to_dict(self, include_timings: bool = False) -> dict:
        checks = []
        for r in self.results:
            entry: dict[str, Any] = {
                "id": r.check_id,
                "passed": r.passed,
                "witnesses": r.witnesses,
            }
            if r.detail:
                entry["detail"] = r.detail
            if include_timings and r.seconds is not None:
                entry["seconds"] = r.seconds
            checks.append(entry)
        out = {"checks": checks, "passed": self.passed}
        if self.title:
            out["title"] = self.title
        return out

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(
            self.to_dict(include_timings), sort_keys=True, separators=(",", ":")
        )
