from .render import SCHEMAS, FigureJob, SchemaError, render

__version__ = "0.1.0"

__all__ = ["SCHEMAS", "FigureJob", "SchemaError", "render", "__version__"]
