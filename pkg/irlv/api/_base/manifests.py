# irlv/api/_base/manifests.py
from typing import Iterable, Optional

from pydantic import BaseModel

from irlv.config.config_settings import config_digest
from irlv.schemas.run import Experiment, Manifest
from irlv.utils.json_utils import to_jsonable


def new_manifest(
    command: str,
    config: BaseModel,
    experiment: Optional[Experiment] = None,
    map_indices: Iterable[int] = (),
    **fields,
) -> Manifest:
    """Config echo, digest and seeds of one command; inputs, outputs and results are filled in by the caller."""
    exp = experiment if experiment is not None else config
    seed = getattr(exp, "seed", None)
    return Manifest(
        command=command,
        name=getattr(exp, "name", getattr(config, "figure", "")),
        config=config.model_dump(mode="json"),
        config_sha256=config_digest(config),
        seed=seed,
        map_seeds=[[seed, i] for i in map_indices] if seed is not None else [],
        sizes=exp.sizes if isinstance(exp, Experiment) else {},
        **{k: to_jsonable(v) for k, v in fields.items()},
    )
