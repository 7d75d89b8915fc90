from irlv.config.config_settings.config_schema import AppConfig
from irlv.config.settings import settings
from irlv.core.logger import get_logger


class BaseService:
    def __init__(self, app_config: AppConfig = None) -> None:
        self.settings: AppConfig = app_config or settings
        self.logger = get_logger(self.__class__.__name__)
