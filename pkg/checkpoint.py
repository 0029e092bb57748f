"""Checkpoint management for resumable order-by-order exact solves."""

import json
import os
import shutil
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from wz_borel.scalars import ZetaPoly, zp_from_json, zp_to_json

STATE_FILE = "state.json"

# Config entries that change the coefficients; any mismatch blocks a resume.
KEY_OPTIONS = ("kernel", "max_zeta_index")


@dataclass
class CheckpointState:
    """State saved in a checkpoint for resumable processing."""

    model: str
    target_order: int
    config: Dict[str, Any]
    coefficients: List[ZetaPoly]

    @property
    def completed_order(self) -> int:
        return len(self.coefficients)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model,
            "target_order": self.target_order,
            "config": self.config,
            "completed_order": self.completed_order,
            "coefficients": [zp_to_json(c) for c in self.coefficients],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CheckpointState":
        coefficients = [zp_from_json(c) for c in data["coefficients"]]
        if data["completed_order"] != len(coefficients):
            raise ValueError("completed_order does not match the stored coefficients")
        return cls(
            model=data["model"],
            target_order=data["target_order"],
            config=data["config"],
            coefficients=coefficients,
        )


@dataclass
class CheckpointInspection:
    """Checkpoint compatibility result for resume and status reporting."""

    exists: bool
    resume_compatible: bool
    completed_order: int = 0
    target_order: Optional[int] = None
    reason: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "exists": self.exists,
            "resume_compatible": self.resume_compatible,
            "completed_order": self.completed_order,
            "target_order": self.target_order,
            "reason": self.reason,
        }


def get_checkpoint_dir(output_path: str) -> str:
    """Get the checkpoint directory path for a given output file."""
    return f"{output_path}.checkpoint"


def _state_path(checkpoint_dir: str) -> str:
    return os.path.join(checkpoint_dir, STATE_FILE)


def save_checkpoint(checkpoint_dir: str, state: CheckpointState) -> None:
    """Save checkpoint state to disk, replacing the previous file atomically."""
    os.makedirs(checkpoint_dir, exist_ok=True)
    state_path = _state_path(checkpoint_dir)
    tmp_path = state_path + ".tmp"
    with open(tmp_path, "w", encoding="utf-8") as f:
        json.dump(state.to_dict(), f, indent=2, sort_keys=True)
    os.replace(tmp_path, state_path)


def load_checkpoint(checkpoint_dir: str) -> Optional[CheckpointState]:
    """Load checkpoint state from disk."""
    state_path = _state_path(checkpoint_dir)
    if not os.path.exists(state_path):
        return None
    try:
        with open(state_path, "r", encoding="utf-8") as f:
            data = json.load(f)
        return CheckpointState.from_dict(data)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError):
        return None


def cleanup_checkpoint(checkpoint_dir: str) -> None:
    """Remove checkpoint directory and all its contents."""
    if os.path.exists(checkpoint_dir):
        shutil.rmtree(checkpoint_dir)


def inspect_checkpoint(
    checkpoint_dir: str,
    model: str,
    config: Dict[str, Any],
) -> CheckpointInspection:
    """Inspect a checkpoint using the same compatibility rules as resume mode."""
    if not os.path.exists(_state_path(checkpoint_dir)):
        return CheckpointInspection(exists=False, resume_compatible=False, reason="missing")

    state = load_checkpoint(checkpoint_dir)
    if state is None:
        return CheckpointInspection(exists=True, resume_compatible=False, reason="corrupt")

    if state.model != model:
        return CheckpointInspection(
            exists=True,
            resume_compatible=False,
            completed_order=state.completed_order,
            target_order=state.target_order,
            reason="model_mismatch",
        )

    for key in KEY_OPTIONS:
        if state.config.get(key) != config.get(key):
            return CheckpointInspection(
                exists=True,
                resume_compatible=False,
                completed_order=state.completed_order,
                target_order=state.target_order,
                reason="config_mismatch",
            )

    return CheckpointInspection(
        exists=True,
        resume_compatible=True,
        completed_order=state.completed_order,
        target_order=state.target_order,
    )


def verify_checkpoint(checkpoint_dir: str, model: str, config: Dict[str, Any]) -> bool:
    """Verify that a checkpoint is valid for the current run."""
    return inspect_checkpoint(checkpoint_dir, model, config).resume_compatible
