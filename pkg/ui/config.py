"""
SwarmWave UI Configuration

Colour schemes for rendered frames and console output, frame sizing and the
default user settings.
"""

# Color schemes
DARK_THEME = {
    # Background colors
    "background": "#0E1621",    # Frame background
    "grid": "#17212B",          # Axis / grid lines

    # Text colors
    "text_light": "#FFFFFF",    # Labels
    "text_gray": "#8696A0",     # Secondary labels

    # Robot roles
    "role_boundary": "#3E92CC",
    "role_wave_outer": "#FF8C00",
    "role_wave_inner": "#FFC107",
    "role_inner": "#8696A0",
    "role_unknown": "#586975",

    # Structural elements
    "boundary_line": "#5CB85C",     # Connectivity-Boundary polyline
    "segment_old": "#FF8C00",       # Outer wave ring fill
    "segment_new": "#FFC107",       # Inner wave ring fill
    "range_circle": "#E53935",      # Viewing range

    # Status colors
    "success": "#43A047",
    "error": "#E53935",
    "warning": "#FF8C00",
    "info": "#2196F3",
}

LIGHT_THEME = {
    # Background colors
    "background": "#FFFFFF",
    "grid": "#E9EDEF",

    # Text colors
    "text_light": "#1E1E1E",
    "text_gray": "#667781",

    # Robot roles
    "role_boundary": "#2D88FF",
    "role_wave_outer": "#FF9800",
    "role_wave_inner": "#FBC02D",
    "role_inner": "#667781",
    "role_unknown": "#A0A0A0",

    # Structural elements
    "boundary_line": "#4CAF50",
    "segment_old": "#FF9800",
    "segment_new": "#FBC02D",
    "range_circle": "#E53935",

    # Status colors
    "success": "#43A047",
    "error": "#E53935",
    "warning": "#FF9800",
    "info": "#2196F3",
}

# Frame sizing (pixels, except robot_radius which is in world units)
FRAME_DIMENSIONS = {
    "width": 800,
    "height": 800,
    "margin": 40,
    "robot_radius": 0.08,
    "line_width": 1.5,
    "segment_opacity": 0.25,
}

# Default application settings
DEFAULT_SETTINGS = {
    "theme": "light",
    "out_dir": "swarmwave-out",
    "formats": ["csv", "json"],
    "audit_every": 1,
    "frames_every": 1,
}


def role_color(theme: dict, label: str) -> str:
    """Fill colour for a role label such as 'boundary:3' or 'wave-inner:7'"""
    kind = label.split(":", 1)[0] if label else ""
    key = {
        "boundary": "role_boundary",
        "wave-outer": "role_wave_outer",
        "wave-inner": "role_wave_inner",
        "inner": "role_inner",
    }.get(kind, "role_unknown")
    return theme[key]


# Get the current theme based on settings
def get_current_theme(theme_name="light"):
    """Return the color scheme for the specified theme"""
    return DARK_THEME if theme_name.lower() == "dark" else LIGHT_THEME
