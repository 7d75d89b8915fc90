from .run_schemas import (
    SCHEMA_VERSION,
    EdaSection,
    EvalSection,
    Experiment,
    FigureBundle,
    GlrtSection,
    GridSection,
    Manifest,
    MlpSection,
    ModelSection,
    NpSection,
    OutputSection,
    QuantizedSection,
    RunConfig,
    TrainingSection,
)

__all__ = [
    "SCHEMA_VERSION",
    "EdaSection",
    "EvalSection",
    "Experiment",
    "FigureBundle",
    "GlrtSection",
    "GridSection",
    "Manifest",
    "MlpSection",
    "ModelSection",
    "NpSection",
    "OutputSection",
    "QuantizedSection",
    "RunConfig",
    "TrainingSection",
]
