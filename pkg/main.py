#!/usr/bin/env python3
"""
SwarmWave - Symmetry-Preserving Swarm Gathering Simulator

Runs oblivious robot swarms under the Go-To-The-Average and contracting-wave
protocols in fully synchronous rounds, audits every round and renders the
recorded traces as SVG frames.
"""

import argparse
import json
import logging
import os
import sys
from typing import List, Optional

# Add the parent directory to the path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from core.application import SwarmWaveApp
from core.errors import ScenarioError, SwarmWaveError, TraceExportError
from core.scenarios import GENERATORS
from core.simulator import Termination
from ui.console import (
    print_audit_table,
    print_error,
    print_generators,
    print_settings,
    print_start_checks,
    print_summary,
)
from utils.helpers import parse_formats, parse_overrides, parse_setting

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
)

# Create logger
logger = logging.getLogger('swarmwave')

LOG_DIRECTORY = os.path.expanduser('~/.swarmwave')

EXIT_CODES = {
    Termination.NEAR_GATHERING: 0,
    Termination.MAX_ROUNDS: 2,
    Termination.ERROR: 1,
}


def _add_file_logging():
    """Mirror log records to ~/.swarmwave/swarmwave.log"""
    try:
        os.makedirs(LOG_DIRECTORY, exist_ok=True)
        logging.getLogger().addHandler(
            logging.FileHandler(os.path.join(LOG_DIRECTORY, 'swarmwave.log'))
        )
    except OSError as e:
        logger.warning(f"File logging disabled: {e}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="SwarmWave - symmetry-preserving swarm gathering simulator"
    )
    parser.add_argument('--debug', action='store_true', help='Enable debug logging')
    commands = parser.add_subparsers(dest='command', required=True)

    for name, help_text in (('run', 'Run a scenario and write its trace'),
                            ('audit', 'Run a scenario with every audit enabled')):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument('--scenario', required=True, help='Scenario JSON file')
        sub.add_argument('--out', help='Output directory for the trace')
        sub.add_argument('--format', help='Comma-separated subset of csv,json,svg')
        sub.add_argument('--audit-every', type=int, help='Audit every K-th round')
        sub.add_argument('--set', action='append', default=[], metavar='KEY=VALUE',
                         help='Override a scenario field')

    sub = commands.add_parser('scenarios', help='List or emit built-in scenarios')
    sub.add_argument('--list', action='store_true', help='List the generators')
    sub.add_argument('--emit', metavar='NAME', help='Generator to write to a scenario file')
    sub.add_argument('--params', default='{}', help='Generator parameters as a JSON object')
    sub.add_argument('--out', help='Scenario file to write')
    sub.add_argument('--set', action='append', default=[], metavar='KEY=VALUE',
                     help='Override a scenario field')

    sub = commands.add_parser('render', help='Render a trace directory to SVG frames')
    sub.add_argument('--trace', required=True, help='Trace directory')
    sub.add_argument('--out', help='Frame directory (default: TRACE/frames)')
    sub.add_argument('--frames-every', type=int, help='Render every K-th round')
    sub.add_argument('--range-for', type=int, metavar='INDEX',
                     help="Draw this robot's viewing range")

    sub = commands.add_parser('config', help='Show or change user defaults')
    sub.add_argument('--set', action='append', default=[], metavar='KEY=VALUE',
                     help='Change a default, e.g. theme=dark')
    return parser


def cmd_run(app: SwarmWaveApp, args, all_audits: bool = False) -> int:
    try:
        scenario = app.load_scenario(args.scenario, parse_overrides(args.set))
        formats = parse_formats(args.format) if args.format else None
    except ScenarioError as e:
        print_error(str(e))
        return 1
    except ValueError as e:
        print_error(str(e))
        return 1
    if args.audit_every is not None and args.audit_every < 1:
        print_error(f"--audit-every must be positive, got {args.audit_every}")
        return 1
    try:
        if all_audits:
            trace = app.audit_scenario(scenario, args.out, formats, args.audit_every)
        else:
            trace = app.run_scenario(scenario, args.out, formats, args.audit_every)
    except TraceExportError as e:
        print_error(str(e))
        return 1
    if all_audits:
        print_start_checks(trace.start_audits)
        print_audit_table(trace.audit_failures())
    print_summary(trace)
    return EXIT_CODES[trace.termination]


def cmd_scenarios(app: SwarmWaveApp, args) -> int:
    if args.list or not args.emit:
        print_generators()
        return 0
    if args.emit not in GENERATORS:
        print_error(f"unknown generator '{args.emit}'; choose from {sorted(GENERATORS)}")
        return 1
    try:
        params = json.loads(args.params)
        overrides = parse_overrides(args.set)
    except (json.JSONDecodeError, ScenarioError) as e:
        print_error(f"bad generator parameters: {e}")
        return 1
    path = args.out or f"{args.emit}.json"
    scenario = app.emit_scenario(args.emit, path, params, overrides)
    if scenario is None:
        print_error(f"could not emit '{args.emit}'")
        return 1
    print(f"{scenario.name}: {scenario.n} robots -> {path}")
    return 0


def cmd_render(app: SwarmWaveApp, args) -> int:
    if args.frames_every is not None and args.frames_every < 1:
        print_error(f"--frames-every must be positive, got {args.frames_every}")
        return 1
    out_dir = args.out or os.path.join(args.trace, SwarmWaveApp.FRAMES_SUBDIR)
    written = app.render(args.trace, out_dir, args.frames_every, args.range_for)
    if not written:
        print_error(f"nothing rendered from {args.trace}")
        return 1
    print(f"{len(written)} frames -> {out_dir}")
    return 0


def cmd_config(app: SwarmWaveApp, args) -> int:
    try:
        changes = parse_overrides(args.set)
        for key, raw in changes.items():
            if not app.set_setting(key, parse_setting(key, raw)):
                print_error(f"unknown setting '{key}'; choose from {sorted(app.settings)}")
                return 1
    except (ScenarioError, ValueError) as e:
        print_error(str(e))
        return 1
    print_settings(app.settings)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for SwarmWave"""
    args = build_parser().parse_args(argv)

    _add_file_logging()
    if args.debug:
        logger.setLevel(logging.DEBUG)
        logging.getLogger('core').setLevel(logging.DEBUG)

    try:
        app = SwarmWaveApp()
        if args.command == 'run':
            return cmd_run(app, args)
        if args.command == 'audit':
            return cmd_run(app, args, all_audits=True)
        if args.command == 'scenarios':
            return cmd_scenarios(app, args)
        if args.command == 'config':
            return cmd_config(app, args)
        return cmd_render(app, args)
    except SwarmWaveError as e:
        logger.error(f"Error in {args.command}: {e}")
        print_error(str(e))
        return 1
    except Exception as e:
        logger.error(f"Error in main: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
