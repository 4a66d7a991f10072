"""Figure renderer for measured-surface-code campaign outputs."""

__version__ = "0.1.0"

from .figures import KINDS, RENDERERS

__all__ = ["KINDS", "RENDERERS", "__version__"]
