from irlv.config.config_settings.config_loader import load_config_file
from irlv.config.config_settings.run_config_loader import (
    available_figures,
    config_digest,
    load_figure_bundle,
    load_run_config,
)

__all__ = ["available_figures", "config_digest", "load_config_file", "load_figure_bundle", "load_run_config"]
