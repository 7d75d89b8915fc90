# irlv/api/routes/figures/figure_router.py
from typing import Optional

from irlv.api._base import FORCE, JOBS, Arg, CommandRouter, new_manifest
from irlv.api.dependencies import get_repository_factory
from irlv.api.routes.experiments.experiment_router import run_recorded
from irlv.config.config_settings import available_figures, load_figure_bundle
from irlv.config.settings import settings
from irlv.core.exceptions import ConfigException
from irlv.core.logger import get_logger
from irlv.repo import METRICS_NAME, ROC_NAME, manifest_name
from irlv.schemas.run import Manifest

logger = get_logger(__name__)

router = CommandRouter()


@router.command(
    "reproduce-figure",
    summary="run a canned figure bundle at desk scale",
    arguments=[
        Arg.of("figure", help=f"bundled figure, one of {', '.join(available_figures())}"),
        Arg.of("--grid", default=None, help="measured grid CSV for bundles that need one"),
        Arg.of("--output", default=None, help="output directory, defaults to figures/<figure>"),
        JOBS,
        FORCE,
    ],
)
def cmd_reproduce_figure(
    figure: str,
    grid: Optional[str] = None,
    output: Optional[str] = None,
    jobs: Optional[int] = None,
    force: bool = False,
) -> Manifest:
    """Each run of the bundle writes its curves under ``<run name>/`` of one output directory."""
    bundle = load_figure_bundle(figure)
    if bundle.requires_grid and grid is None:
        raise ConfigException(f"{figure} evaluates measured attenuation maps; pass --grid")

    repos = get_repository_factory(output or f"figures/{figure}", force)
    repos.storage.check_writable(*(f"{rc.name}/{ROC_NAME}" for rc in bundle.runs), manifest_name("reproduce-figure"))
    logger.info(f"🖼️ {figure}: {len(bundle.runs)} run(s). {bundle.description}")

    inputs, results, map_seeds = {}, {}, []
    for rc in bundle.runs:
        result, run_inputs = run_recorded(rc, repos, grid if rc.grid is not None else None, jobs, prefix=f"{rc.name}/")
        inputs.update(run_inputs)
        results[rc.name] = result.summary()
        map_seeds.extend([rc.seed, i] for i in range(rc.eval.n_maps))

    if settings.runner.export_metrics or any(rc.output.export_metrics for rc in bundle.runs):
        repos.runs.save_metrics(METRICS_NAME)
    manifest = new_manifest("reproduce-figure", bundle, inputs=inputs, results=results)
    manifest = manifest.model_copy(update={"map_seeds": map_seeds})
    repos.runs.save_manifest(manifest)
    logger.info(f"✅ {figure}: outputs in {repos.storage.root}")
    return manifest
