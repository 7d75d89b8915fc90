from .grid_service import GridDataset, grid_columns, grid_frame, parse_grid

__all__ = ["GridDataset", "grid_columns", "grid_frame", "parse_grid"]
