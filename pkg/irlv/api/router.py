from irlv.api._base import CommandRouter
from irlv.api.routes.data import ingest_router
from irlv.api.routes.experiments import experiment_router
from irlv.api.routes.figures import figure_router

api_router = CommandRouter()

# 所有子命令的路由集中在这里, 新增命令只需追加一项
routers_to_include = [
    # experiment routers
    {"router": experiment_router.router},

    # data routers
    {"router": ingest_router.router},

    # figure routers
    {"router": figure_router.router},
]

for route_config in routers_to_include:
    api_router.include_router(**route_config)
