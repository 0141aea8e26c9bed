"""
SwarmWave Core Package

Provides the main components of the SwarmWave simulator:
- Configuration, BoundaryCycle: Robot positions and their Connectivity-Boundary
- gta_step: The epsilon-Go-To-The-Average protocol
- main_step, invert_round: The contracting-wave protocol and its inverse
- gtc_step: The Go-To-The-Center counterexample
- Scenario, Simulator, Trace: Scenario files and the FSYNC round engine
"""

from core.geometry import BoundaryCycle, Configuration
from core.protocol_gta import GtaParams, gta_step
from core.protocol_gtc import GtcParams, gtc_step
from core.protocol_wave import WaveParams, invert_round, main_step
from core.scenarios import Scenario, build_scenario
from core.simulator import Simulator, Termination, Trace, run

__version__ = "1.0.0"

__all__ = [
    'BoundaryCycle',
    'Configuration',
    'GtaParams',
    'gta_step',
    'GtcParams',
    'gtc_step',
    'WaveParams',
    'invert_round',
    'main_step',
    'Scenario',
    'build_scenario',
    'Simulator',
    'Termination',
    'Trace',
    'run',
]
