from .channel_schemas import ChannelParams, ChannelSection

__all__ = ["ChannelParams", "ChannelSection"]
