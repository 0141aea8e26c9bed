"""
Trace files

A run directory holds:
- positions.csv  round,robot,x,y,role
- metrics.csv    round,diameter,symmetricity,rotation_order,connected,convex_boundary,max_hole,min_dist,audits_failed
- trace.json     scenario, termination, start checks and per-round audit results
Floats are written in shortest round-trip form so a reloaded trace holds the
same doubles.
"""

import csv
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from core.errors import ScenarioError
from core.geometry import Configuration
from core.scenarios import Scenario
from core.simulator import Trace
from utils.helpers import format_float

# Configure logging
logger = logging.getLogger(__name__)

POSITIONS_FILE = "positions.csv"
METRICS_FILE = "metrics.csv"
ENVELOPE_FILE = "trace.json"

POSITIONS_HEADER = ["round", "robot", "x", "y", "role"]
METRICS_HEADER = ["round", "diameter", "symmetricity", "rotation_order", "connected",
                  "convex_boundary", "max_hole", "min_dist", "audits_failed"]


@dataclass
class LoadedFrame:
    round: int
    positions: Configuration
    roles: List[str] = field(default_factory=list)


@dataclass
class LoadedTrace:
    frames: List[LoadedFrame]
    scenario: Optional[Scenario] = None
    termination: Optional[str] = None
    detail: str = ""

    @property
    def rounds(self) -> int:
        return self.frames[-1].round if self.frames else 0


def write_positions(trace: Trace, path: str):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(POSITIONS_HEADER)
        for record in trace.records:
            roles = record.roles or []
            for i, (x, y) in enumerate(record.positions.positions):
                role = roles[i].label if i < len(roles) and roles[i] is not None else ""
                writer.writerow([record.round, i, format_float(x), format_float(y), role])


def write_metrics(trace: Trace, path: str):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(METRICS_HEADER)
        for record in trace.records:
            row = record.metrics_dict()
            writer.writerow([format_float(row[key]) for key in METRICS_HEADER])


def trace_envelope(trace: Trace) -> dict:
    return {
        "scenario": trace.scenario.to_dict(),
        "termination": trace.termination.value,
        "detail": trace.detail,
        "summary": trace.summary(),
        "start_audits": [a.to_dict() for a in trace.start_audits.values()],
        "audits": [
            {"round": r.round, "results": [a.to_dict() for a in r.audit_results.values()]}
            for r in trace.records if r.audit_results
        ],
    }


def write_trace(trace: Trace, out_dir: str, formats: Optional[List[str]] = None) -> List[str]:
    """Write the csv/json files of a trace; returns the paths written"""
    formats = formats or ["csv", "json"]
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if "csv" in formats:
        for name, writer in ((POSITIONS_FILE, write_positions), (METRICS_FILE, write_metrics)):
            path = os.path.join(out_dir, name)
            writer(trace, path)
            written.append(path)
    if "json" in formats:
        path = os.path.join(out_dir, ENVELOPE_FILE)
        with open(path, "w") as f:
            json.dump(trace_envelope(trace), f, indent=2)
        written.append(path)
    logger.debug(f"Trace of '{trace.scenario.name}' written to {out_dir}")
    return written


def read_metrics(path: str) -> List[Dict[str, str]]:
    with open(path, "r", newline="") as f:
        return list(csv.DictReader(f))


def read_positions(path: str) -> List[LoadedFrame]:
    rows: Dict[int, List[tuple]] = {}
    with open(path, "r", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != POSITIONS_HEADER:
            raise ScenarioError(path, f"expected header {POSITIONS_HEADER}, got {reader.fieldnames}")
        for row in reader:
            rows.setdefault(int(row["round"]), []).append(
                (int(row["robot"]), float(row["x"]), float(row["y"]), row["role"])
            )
    frames = []
    for t in sorted(rows):
        entries = sorted(rows[t])
        positions = np.array([(x, y) for _, x, y, _ in entries], dtype=float)
        frames.append(LoadedFrame(t, Configuration(positions), [role for *_, role in entries]))
    return frames


def load_trace(directory: str) -> LoadedTrace:
    """Frames from positions.csv plus scenario and termination from trace.json if present"""
    positions_path = os.path.join(directory, POSITIONS_FILE)
    if not os.path.isfile(positions_path):
        raise ScenarioError("trace", f"no {POSITIONS_FILE} in {directory}")
    loaded = LoadedTrace(read_positions(positions_path))
    envelope_path = os.path.join(directory, ENVELOPE_FILE)
    if os.path.isfile(envelope_path):
        with open(envelope_path, "r") as f:
            envelope = json.load(f)
        loaded.scenario = Scenario.from_dict(envelope["scenario"])
        loaded.termination = envelope.get("termination")
        loaded.detail = envelope.get("detail", "")
    return loaded
