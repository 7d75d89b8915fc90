from .llr_schemas import LlrModel

__all__ = ["LlrModel"]
