"""Service configuration.

A config picks the scoring mode, the model identifier used in model
mode, the largest batch a single request may carry, and a device hint
for model inference. Echo mode never touches model artifacts, so it
works offline with any model identifier.
"""

from __future__ import annotations

from dataclasses import dataclass

MODES = ("echo", "model")

DEFAULT_MODEL = "cross-encoder/mmarco-mMiniLMv2-L12-H384-v1"
DEFAULT_MAX_BATCH = 256
DEFAULT_DEVICE = "cpu"


@dataclass(frozen=True)
class ServiceConfig:
    """Settings for one service process."""

    mode: str = "echo"
    model: str = DEFAULT_MODEL
    max_batch: int = DEFAULT_MAX_BATCH
    device: str = DEFAULT_DEVICE

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if not isinstance(self.model, str) or not self.model:
            raise ValueError("model identifier must be a non-empty string")
        if not isinstance(self.max_batch, int) or isinstance(self.max_batch, bool):
            raise ValueError(f"max_batch must be an integer, got {self.max_batch!r}")
        if self.max_batch <= 0:
            raise ValueError(f"max_batch must be positive, got {self.max_batch}")
        if not isinstance(self.device, str) or not self.device:
            raise ValueError("device hint must be a non-empty string")
