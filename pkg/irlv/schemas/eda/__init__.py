from .eda_schemas import EdaModel

__all__ = ["EdaModel"]
