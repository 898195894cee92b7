# run_acceptance.py
"""
Run every packaged scene's expected block plus the scene-free suites, print a
summary and optionally write all reports to one JSON file.
"""

import json
import sys
from typing import List, Optional

from chernloc.config.settings import get_settings
from chernloc.layers.report.renderers import render_table
from chernloc.layers.report.report_service import ReportService
from chernloc.models.data_models import Report
from chernloc.utils.logging_setup import configure_logging


def run_acceptance(service: Optional[ReportService] = None) -> List[Report]:
    service = service or ReportService()
    reports = [service.run("verify expected", entry["name"]) for entry in service.scenes.list_scenes()]
    reports.append(service.run("verify stokes", flags={"trials": 30}))
    reports.append(service.run("extendability bloom-herrera", flags={"max_degree": 20}))
    return reports


def output_reports_json(reports: List[Report], output_file: Optional[str] = None) -> str:
    json_str = json.dumps(
        [r.model_dump(mode="json", by_alias=True) for r in reports], indent=2, sort_keys=True, ensure_ascii=False
    )
    if output_file:
        with open(output_file, "w", encoding="utf-8") as f:
            f.write(json_str)
        print(f"Reports written to {output_file}")
    return json_str


if __name__ == "__main__":
    settings = get_settings()
    configure_logging(settings.log_level)

    reports = run_acceptance(ReportService(settings))
    for report in reports:
        print("=" * 80)
        print(render_table(report))
    print("=" * 80)

    if len(sys.argv) > 1:
        output_reports_json(reports, output_file=sys.argv[1])

    failed = [f"{r.command} {r.scene or ''}".strip() for r in reports if not r.passed]
    print("SUMMARY")
    print("=" * 80)
    print(f"Reports: {len(reports)}")
    print(f"Failed: {', '.join(failed) if failed else 'none'}")
    print("=" * 80)
    sys.exit(1 if failed else 0)
