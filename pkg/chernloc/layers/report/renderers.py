"""
Report Renderers
================
JSON and plain-text table renderings of a Report. Both are deterministic: keys are
sorted and floats are printed with a fixed number of digits in tables.
"""

import json
from typing import List

from chernloc.models.data_models import Report


def render_json(report: Report) -> str:
    return json.dumps(report.model_dump(mode="json", by_alias=True), indent=2, sort_keys=True, ensure_ascii=False)


def _complex_text(value: List[float]) -> str:
    re_part, im_part = value
    sign = "-" if im_part < 0 else "+"
    return f"{re_part:.12g} {sign} {abs(im_part):.3g}i"


def _rows(headers: List[str], rows: List[List[str]]) -> List[str]:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    out = [line, "  ".join("-" * w for w in widths)]
    out.extend("  ".join(cell.ljust(w) for cell, w in zip(r, widths)) for r in rows)
    return out


def render_table(report: Report) -> str:
    """Command header, results, verdicts and the overall outcome as aligned text."""
    lines = [f"command: {report.command}"]
    if report.scene:
        lines.append(f"scene:   {report.scene}")
    if report.results:
        lines.append("")
        lines.extend(
            _rows(
                ["result", "value", "error", "cells"],
                [[r.name, _complex_text(r.value), f"{r.error:.2e}", str(r.cells)] for r in report.results],
            )
        )
    if report.verdicts:
        lines.append("")
        lines.extend(
            _rows(
                ["check", "status", "measured", "tol", "detail"],
                [
                    [
                        v.name,
                        v.status.value,
                        "" if v.measured is None else f"{v.measured:.3e}",
                        "" if v.tol is None else f"{v.tol:.1e}",
                        v.detail,
                    ]
                    for v in report.verdicts
                ],
            )
        )
    membership = report.details.get("membership")
    if membership:
        status = membership["status"]
        if membership.get("obstruction_degree") is not None:
            status += f" at N* = {membership['obstruction_degree']}"
        lines.append("")
        lines.append(f"membership: {status} (N = {membership['max_degree']})")
        lines.append(f"conclusion: {report.details['conclusion']}")
    scenes = report.details.get("scenes")
    if scenes:
        lines.append("")
        lines.extend(_rows(["scene", "file", "description"], [[s["name"], s["file"], s["description"]] for s in scenes]))
    lines.append("")
    lines.append(f"passed: {'yes' if report.passed else 'no'}")
    return "\n".join(lines)
