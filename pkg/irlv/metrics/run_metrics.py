# irlv/metrics/run_metrics.py
from prometheus_client import CollectorRegistry, Counter, Histogram, generate_latest

registry = CollectorRegistry()

training_duration = Histogram(
    "irlv_training_duration_seconds",
    "Time spent training a verifier on one shadowing map",
    ["model_kind"],
    registry=registry,
)

scoring_duration = Histogram(
    "irlv_scoring_duration_seconds",
    "Time spent scoring a test set",
    ["model_kind"],
    registry=registry,
)

skipped_maps = Counter(
    "irlv_skipped_maps_total",
    "Shadowing maps skipped because training or scoring failed",
    ["model_kind"],
    registry=registry,
)


def metrics_text() -> str:
    """当前进程的指标, Prometheus 文本格式"""
    return generate_latest(registry).decode("utf-8")
