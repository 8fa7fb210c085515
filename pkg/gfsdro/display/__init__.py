"""
Display components for the gfsdro package.

Functions:
    display_spec: Summary panel of a validated experiment spec
    display_errors: List of spec validation errors
    display_table: Rich rendering of a metric table
    display_artifact: Every table of a finished run
    display_gradcheck: Gradient-check report per loss family

See Also:
    gfsdro.display.console: Module containing the actual display implementations
"""

# Expose module
from gfsdro.display.console import (
    console,
    display_artifact,
    display_errors,
    display_gradcheck,
    display_spec,
    display_table,
)

__all__ = [
    "console",
    "display_artifact",
    "display_errors",
    "display_gradcheck",
    "display_spec",
    "display_table",
]
