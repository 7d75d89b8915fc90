# irlv/api/_base/command_router.py
"""
Decorator-based subcommand registry on top of argparse.

Handlers stay plain functions: the decorator records them and returns them
unchanged, so they can be called directly with keyword arguments.
"""
import argparse
import inspect
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence


@dataclass(frozen=True)
class Arg:
    """One argparse argument: positional names or flags plus ``add_argument`` keywords."""
    flags: Sequence[str]
    options: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def of(cls, *flags: str, **options) -> "Arg":
        return cls(tuple(flags), options)


# 通用参数
FORCE = Arg.of("--force", action="store_true", help="overwrite existing outputs")
JOBS = Arg.of("--jobs", type=int, default=None, help="maximum worker processes for map-parallel runs")


@dataclass
class CommandRoute:
    name: str
    handler: Callable[..., Any]
    summary: str = ""
    arguments: List[Arg] = field(default_factory=list)


class CommandRouter:
    def __init__(self, prefix: str = ""):
        self.prefix = prefix
        self.routes: List[CommandRoute] = []

    def command(self, name: str, summary: str = "", arguments: Sequence[Arg] = ()):
        def decorator(func: Callable[..., Any]) -> Callable[..., Any]:
            self.routes.append(CommandRoute(name, func, summary, list(arguments)))
            return func
        return decorator

    def include_router(self, router: "CommandRouter", prefix: str = "") -> None:
        for route in router.routes:
            name = f"{prefix}{route.name}" if prefix else route.name
            self.routes.append(CommandRoute(name, route.handler, route.summary, route.arguments))

    def find(self, name: str) -> Optional[CommandRoute]:
        return next((r for r in self.routes if r.name == name), None)

    def build_parser(self, prog: str = "irlv", description: str = "") -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(prog=prog, description=description)
        subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
        for route in self.routes:
            sub = subparsers.add_parser(route.name, help=route.summary, description=route.summary)
            for arg in route.arguments:
                sub.add_argument(*arg.flags, **arg.options)
        return parser

    def dispatch(self, namespace: argparse.Namespace) -> Any:
        """Call the handler with the parsed values it declares as parameters."""
        route = self.find(namespace.command)
        params = inspect.signature(route.handler).parameters
        values = {k: v for k, v in vars(namespace).items() if k in params}
        return route.handler(**values)
