import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from django.conf import settings

from protocols.flow import FlowConfig

COMMANDS = ("check", "solve", "simulate", "perturb", "rigidity")


@dataclass(frozen=True)
class RunConfig:
    """Everything one ``bearing`` invocation needs; echoed into its outputs."""

    input: Path
    command: str
    out: Optional[Path] = None
    seed: int = 0
    rank_tol: Optional[float] = None
    loc_tol: Optional[float] = None
    flow: FlowConfig = field(default_factory=FlowConfig)
    max_angles: tuple[float, ...] = ()
    angles_file: Optional[Path] = None
    trials: int = 1
    nodewise: bool = False
    emit_matrices: bool = False

    @classmethod
    def from_options(cls, command, options):
        seed = options.get("seed")
        max_angles = tuple(options.get("max_angle") or ())
        if any(not 0.0 <= a <= math.pi for a in max_angles):
            raise ValueError(
                f"--max-angle values must lie in [0, pi], got {list(max_angles)}"
            )
        trials = options.get("trials") or 1
        if trials < 1:
            raise ValueError("--trials must be at least 1")
        return cls(
            input=Path(options["input"]),
            command=command,
            out=Path(options["out"]) if options.get("out") else None,
            seed=settings.BEARING_DEFAULT_SEED if seed is None else seed,
            rank_tol=options.get("tol_rank"),
            loc_tol=options.get("tol_loc"),
            flow=FlowConfig.from_settings(
                step_size=options.get("step"),
                max_steps=options.get("max_steps"),
                convergence_tol=options.get("conv_tol"),
                record_every=options.get("record_every"),
            ),
            max_angles=max_angles,
            angles_file=Path(options["angles_file"]) if options.get("angles_file") else None,
            trials=trials,
            nodewise=bool(options.get("nodewise")),
            emit_matrices=bool(options.get("emit_matrices")),
        )

    def tolerances(self):
        return {
            "rank": self.rank_tol,
            "loc": self.loc_tol,
            "near_singular_factor": settings.BEARING_NEAR_SINGULAR_FACTOR,
            "anchor_block": settings.BEARING_ANCHOR_BLOCK_TOL,
            "convergence": self.flow.convergence_tol,
        }

    def flow_dict(self):
        return {
            "step_size": self.flow.step_size,
            "max_steps": self.flow.max_steps,
            "convergence_tol": self.flow.convergence_tol,
            "record_every": self.flow.record_every,
        }
