"""
Report construction and logging helpers
"""

import json
import logging
from datetime import datetime

from pasting_deformations.config.engine_settings import is_logging_enabled

logger = logging.getLogger(__name__)


class Report:
    """
    Result of one command: echo, status, findings, results, tables and matrix dumps

    Reports carry no timestamps so that repeated runs render byte-identically.
    """

    def __init__(self, command, success=True, message="", exit_code=0):
        self.command = command
        self.success = success
        self.message = message
        self.exit_code = exit_code
        self.findings = []
        self.results = {}
        self.tables = []
        self.matrices = {}
        self.metadata = {}
        self.errors = None
        self.emitted = []

    @property
    def status(self):
        if self.success:
            return "ok"
        return "error" if self.exit_code == 2 else "invalid"

    def add_findings(self, findings):
        self.findings.extend(findings)
        return self

    def add_table(self, title, headers, rows):
        self.tables.append({"title": title, "headers": list(headers), "rows": [list(r) for r in rows]})
        return self

    def fail(self, message, exit_code=1):
        self.success = False
        self.message = message
        self.exit_code = exit_code
        return self

    def to_dict(self):
        data = {
            "command": self.command,
            "status": self.status,
            "exit_code": self.exit_code,
            "message": self.message,
            "findings": list(self.findings),
            "results": self.results,
        }
        if self.tables:
            data["tables"] = self.tables
        if self.matrices:
            data["matrices"] = self.matrices
        if self.metadata:
            data["metadata"] = self.metadata
        if self.errors:
            data["error"] = self.errors
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, default=str)

    def to_text(self):
        lines = [f"$ {self.command}", f"status: {self.status}"]
        if self.message:
            lines.append(self.message)
        if self.findings:
            lines.append(f"findings ({len(self.findings)}):")
            lines.extend(f"  - {finding}" for finding in self.findings)
        for key, value in self.results.items():
            lines.append(f"{key}: {_render_value(value)}")
        for table in self.tables:
            lines.append(f"[{table['title']}]")
            rows = [table["headers"], *table["rows"]]
            widths = [max(len(str(row[i])) for row in rows) for i in range(len(table["headers"]))]
            for row in rows:
                lines.append("  " + "  ".join(str(cell).ljust(width) for cell, width in zip(row, widths)))
        for name, dump in self.matrices.items():
            lines.append(f"[matrix {name}]")
            lines.extend(f"  {row}" for row in dump)
        for key, value in self.metadata.items():
            lines.append(f"# {key}: {_render_value(value)}")
        return "\n".join(lines) + "\n"


def _render_value(value):
    if isinstance(value, (dict, list)):
        return json.dumps(value, default=str)
    return str(value)


def create_report(command, success=True, message="", results=None, findings=None, exit_code=None, errors=None):
    """
    Create a standardized report

    Args:
        command (str): Command echo
        success (bool): Whether the command succeeded
        message (str): Human-readable message
        results (dict): Numeric or structured results
        findings (list): Validation findings
        exit_code (int): Process exit code; derived from success when omitted
        errors (dict): Error details

    Returns:
        Report: Formatted report
    """
    if exit_code is None:
        exit_code = 0 if success else 1
    report = Report(command, success=success, message=message, exit_code=exit_code)
    if results:
        report.results.update(results)
    if findings:
        report.add_findings(findings)
    if not success:
        error_info = {"code": f"ERROR_{exit_code}", "message": message}
        if errors is not None:
            error_info.update(errors)
        report.errors = error_info
    return report


def log_engine_call(command, data=None, config=None):
    """
    Log an engine command for monitoring and debugging

    Args:
        command (str): Command name
        data (dict): Command arguments
    """
    if not is_logging_enabled("commands", config):
        return
    try:
        log_data = {
            "timestamp": datetime.now().isoformat(),
            "command": command,
        }

        if data:
            log_data["arguments"] = data

        logger.info(json.dumps(log_data, indent=2, default=str))

    except Exception as e:
        logger.error("Error logging engine call: %s", e)


def log_complex_build(kind, subject, window, dimensions, config=None):
    """
    Log the assembly of a deformation complex
    """
    if not is_logging_enabled("builds", config):
        return
    log_data = {
        "timestamp": datetime.now().isoformat(),
        "kind": kind,
        "subject": subject,
        "window": list(window),
        "dimensions": dimensions,
    }
    logger.debug(json.dumps(log_data, indent=2, default=str))
