from .learning_schemas import KernelConfig, MlpConfig, autoencoder_config, classifier_config

__all__ = ["KernelConfig", "MlpConfig", "autoencoder_config", "classifier_config"]
