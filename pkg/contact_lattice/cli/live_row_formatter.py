from typing import Any, Mapping, Sequence


def format_row(row: Mapping[str, Any], columns: Sequence[str]) -> str:
    """
    Format a result row for a log line.
    Example: name | value | threshold | status
    """
    return " | ".join(render_cell(col, row.get(col)) for col in columns)


def render_cell(column: str, value: Any) -> str:
    if column in ("status", "decision", "ordered", "passed"):
        return render_status(value)
    if isinstance(value, float):
        return f"{value:.4g}"
    if value is None:
        return "N/A"
    return truncate(str(value), 60)


def truncate(text: str, max_length: int) -> str:
    return text if len(text) <= max_length else text[:max_length - 3] + "..."


def render_status(status: Any) -> str:
    """Rich markup for PASS / FAIL / WARN cells and percolation decisions."""
    if isinstance(status, bool):
        status = "PASS" if status else "FAIL"
    text = str(status)
    style = _STYLES.get(text.upper())
    return f"[{style}]{text}[/{style}]" if style else text


_STYLES = {
    "PASS": "green",
    "FAIL": "red",
    "WARN": "yellow",
    "SUBCRITICAL": "cyan",
    "NEITHER": "yellow",
    "SUPERCRITICAL": "bold green",
}
