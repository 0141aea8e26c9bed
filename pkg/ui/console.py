"""
SwarmWave console output

Run summaries, audit tables and generator listings printed through
prompt_toolkit formatted text.
"""

from html import escape
from typing import Any, Dict

from prompt_toolkit import print_formatted_text
from prompt_toolkit.formatted_text import HTML
from prompt_toolkit.styles import Style

from core.scenarios import GENERATORS
from core.simulator import AuditResult, Termination, Trace

CONSOLE_STYLE = Style.from_dict({
    "ok": "#43A047 bold",
    "fail": "#E53935 bold",
    "warn": "#FF8C00",
    "name": "bold",
    "dim": "#8696A0",
})

TERMINATION_TAGS = {
    Termination.NEAR_GATHERING: "ok",
    Termination.MAX_ROUNDS: "warn",
    Termination.ERROR: "fail",
}


def _print(markup: str):
    print_formatted_text(HTML(markup), style=CONSOLE_STYLE)


def summary_line(trace: Trace) -> str:
    """One line per run: termination, final diameter, symmetricity and audit failures"""
    s = trace.summary()
    tag = TERMINATION_TAGS[trace.termination]
    text = (
        f"<name>{escape(s['scenario'])}</name> [{s['protocol']}] "
        f"<{tag}>{s['termination']}</{tag}> after {s['rounds']} rounds, "
        f"final diameter {s['final_diameter']:.6f}, "
        f"symmetricity {s['symmetricity_start']} -> {s['symmetricity_end']}, "
        f"audit failures {s['audit_failures']}"
    )
    if s["start_checks_failed"]:
        text += f", <warn>start checks failed {s['start_checks_failed']}</warn>"
    if trace.detail:
        text += f" <dim>({escape(trace.detail)})</dim>"
    return text


def print_summary(trace: Trace):
    _print(summary_line(trace))


def print_audit_table(counts: Dict[str, int]):
    if not counts:
        _print("<dim>no audits ran</dim>")
        return
    width = max(len(name) for name in counts)
    for name, failed in sorted(counts.items()):
        tag = "ok" if failed == 0 else "fail"
        _print(f"  {name.ljust(width)}  <{tag}>{failed} failed</{tag}>")


def print_start_checks(results: Dict[str, AuditResult]):
    for name, result in sorted(results.items()):
        tag = "ok" if result.passed else "warn"
        _print(f"  start check {escape(name)}  <{tag}>{result.status}</{tag}> <dim>({escape(result.detail)})</dim>")


def print_settings(settings: Dict[str, Any]):
    width = max(len(key) for key in settings)
    for key, value in sorted(settings.items()):
        shown = ",".join(value) if isinstance(value, list) else value
        _print(f"  <name>{key.ljust(width)}</name>  {escape(str(shown))}")


def print_generators():
    for name, generator in GENERATORS.items():
        _print(f"  <name>{name}</name>  <dim>{escape(generator.description)}</dim>")


def print_error(message: str):
    _print(f"<fail>error:</fail> {escape(message)}")
