"""
SwarmWave Utilities

- helpers: float formatting, override parsing, thread hint
- trace_io: trace files (CSV and JSON) and their loaders
"""
