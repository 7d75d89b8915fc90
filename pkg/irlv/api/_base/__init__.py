from .command_router import FORCE, JOBS, Arg, CommandRoute, CommandRouter
from .manifests import new_manifest

__all__ = ["Arg", "CommandRoute", "CommandRouter", "FORCE", "JOBS", "new_manifest"]
