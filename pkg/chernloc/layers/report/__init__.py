"""
Report Layer Package
====================
This package contains command dispatch, report assembly and the JSON and table renderings.

Exports:
    ReportService: Main service class for the report layer
    render_json: Deterministic JSON rendering of a report
    render_table: Plain-text table rendering of a report
    convention_memo_sha256: Hash of the sign-convention memo
"""

from .conventions import convention_memo_sha256
from .renderers import render_json, render_table
from .report_service import ReportService

__all__ = [
    "ReportService",
    "render_json",
    "render_table",
    "convention_memo_sha256",
]
