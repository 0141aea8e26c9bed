"""
SwarmWave Application Core

Coordinates the pieces a command needs:
- Scenario loading, overrides and emission
- Simulation runs and audit runs
- Trace export and SVG rendering
User defaults live in ~/.swarmwave/config.json.
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional

from core.errors import ScenarioError, SwarmWaveError, TraceExportError
from core.scenarios import Scenario, build_scenario, known_audits
from core.simulator import Simulator, Trace
from ui.config import DEFAULT_SETTINGS
from ui.svg_renderer import render_trace
from utils.trace_io import load_trace, write_trace

# Configure logging
logger = logging.getLogger(__name__)


class SwarmWaveApp:
    """
    The main SwarmWave application class used by every subcommand.
    """

    CONFIG_DIRECTORY = os.path.expanduser("~/.swarmwave")
    CONFIG_FILE = os.path.join(CONFIG_DIRECTORY, "config.json")
    FRAMES_SUBDIR = "frames"

    def __init__(self, config_directory: Optional[str] = None):
        if config_directory is not None:
            self.CONFIG_DIRECTORY = config_directory
            self.CONFIG_FILE = os.path.join(config_directory, "config.json")
        self.config = self._load_config()

    @property
    def settings(self) -> Dict[str, Any]:
        return {**DEFAULT_SETTINGS, **self.config}

    def set_setting(self, key: str, value: Any) -> bool:
        """Update one user default and persist it"""
        if key not in DEFAULT_SETTINGS:
            logger.warning(f"Unknown setting: {key}")
            return False
        self.config[key] = value
        self._save_config()
        logger.info(f"Setting {key} changed to: {value}")
        return True

    def load_scenario(self, path: str, overrides: Optional[Dict[str, str]] = None) -> Scenario:
        """Parse a scenario file; raises ScenarioError naming the offending field"""
        scenario = Scenario.load(path)
        if overrides:
            scenario = scenario.with_overrides(overrides)
        if scenario.qualitative:
            logger.warning(f"Scenario '{scenario.name}' is a qualitative reconstruction")
        return scenario

    def emit_scenario(self, name: str, path: str, params: Optional[Dict[str, Any]] = None,
                      overrides: Optional[Dict[str, str]] = None) -> Optional[Scenario]:
        """Build a generator's scenario and write it to path"""
        try:
            scenario = build_scenario(name, **(params or {}))
            if overrides:
                scenario = scenario.with_overrides(overrides)
            scenario.save(path)
        except (SwarmWaveError, TypeError, OSError) as e:
            logger.error(f"Error emitting scenario '{name}': {e}")
            return None
        logger.info(f"Scenario '{name}' with {scenario.n} robots written to {path}")
        return scenario

    def run_scenario(self, scenario: Scenario, out_dir: Optional[str] = None,
                     formats: Optional[List[str]] = None, audit_every: Optional[int] = None,
                     audits: Optional[List[str]] = None) -> Trace:
        """Run a scenario and write its trace files; raises TraceExportError if they cannot be written"""
        settings = self.settings
        out_dir = out_dir or settings["out_dir"]
        formats = formats or settings["formats"]
        audit_every = audit_every or settings["audit_every"]
        trace = Simulator(scenario, audit_every=audit_every, audits=audits).run()
        if not self.export(trace, out_dir, formats):
            raise TraceExportError(out_dir)
        return trace

    def audit_scenario(self, scenario: Scenario, out_dir: Optional[str] = None,
                       formats: Optional[List[str]] = None,
                       audit_every: Optional[int] = None) -> Trace:
        """Run with every audit known for the scenario's protocol"""
        return self.run_scenario(scenario, out_dir, formats, audit_every,
                                 audits=known_audits(scenario.protocol))

    def export(self, trace: Trace, out_dir: str, formats: List[str]) -> bool:
        try:
            write_trace(trace, out_dir, [f for f in formats if f != "svg"])
            if "svg" in formats:
                # frames are rendered from the files just written
                if not {"csv", "json"} <= set(formats):
                    write_trace(trace, out_dir, ["csv", "json"])
                self.render(out_dir, os.path.join(out_dir, self.FRAMES_SUBDIR))
            return True
        except OSError as e:
            logger.error(f"Error writing trace to {out_dir}: {e}")
            return False

    def render(self, trace_dir: str, out_dir: str, frames_every: Optional[int] = None,
               range_for: Optional[int] = None) -> Optional[List[str]]:
        """Render a trace directory to SVG frames; None if there is nothing to render"""
        settings = self.settings
        try:
            trace = load_trace(trace_dir)
            return render_trace(trace, out_dir, frames_every or settings["frames_every"],
                                range_for, settings["theme"])
        except (SwarmWaveError, ValueError, OSError) as e:
            logger.error(f"Error rendering {trace_dir}: {e}")
            return None

    # Private methods
    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from file or create default"""
        if os.path.exists(self.CONFIG_FILE):
            try:
                with open(self.CONFIG_FILE, 'r') as f:
                    config = json.load(f)
                    logger.debug(f"Loaded configuration from {self.CONFIG_FILE}")
                    return config
            except (OSError, json.JSONDecodeError) as e:
                logger.error(f"Error loading config: {e}")
        return dict(DEFAULT_SETTINGS)

    def _save_config(self):
        """Save configuration to file"""
        try:
            os.makedirs(self.CONFIG_DIRECTORY, exist_ok=True)
            with open(self.CONFIG_FILE, 'w') as f:
                json.dump(self.config, f, indent=2)
        except OSError as e:
            logger.error(f"Error saving config: {e}")
