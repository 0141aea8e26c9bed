"""
SwarmWave UI Package

- config: colour themes and frame dimensions
- svg_renderer: SVG frames of a recorded trace
- console: formatted terminal output
"""
