import logging

from django.core.management.base import BaseCommand, CommandError

from localizability.report import Verdict, classify
from networks.exceptions import (
    BearingNetworkError,
    InternalInconsistency,
    RankDisagreement,
    SingularSystem,
    TooFewAnchors,
)
from networks.io import load_angles, load_network
from protocols.runs import simulate_network, solve_network
from rigidity.analysis import summarize
from rigidity.matrices import bearing_laplacian, projected_incidence, rigidity_matrix
from sensitivity.runs import sweep

from reports.config import COMMANDS, RunConfig
from reports.serializers import dumps, envelope, write_json, write_matrix_csv, write_trajectory_csv

logger = logging.getLogger(__name__)

EXIT_MALFORMED = 1
EXIT_INCONSISTENT = 2
EXIT_NOT_LOCALIZABLE = 3
EXIT_NEAR_SINGULAR = 4
EXIT_STEP_LIMIT = 5

VERDICT_EXIT = {
    Verdict.LOCALIZABLE: 0,
    Verdict.NOT_LOCALIZABLE: EXIT_NOT_LOCALIZABLE,
    Verdict.NEAR_SINGULAR: EXIT_NEAR_SINGULAR,
}


def exit_code_for(exc):
    if isinstance(exc, (InternalInconsistency, RankDisagreement)):
        return EXIT_INCONSISTENT
    if isinstance(exc, (SingularSystem, TooFewAnchors)):
        return EXIT_NOT_LOCALIZABLE
    return EXIT_MALFORMED


class Command(BaseCommand):
    help = "Analyse a bearing network: check | solve | simulate | perturb | rigidity"

    def add_arguments(self, parser):
        parser.add_argument("bearing_command", choices=COMMANDS)
        parser.add_argument("--input", required=True, help="network JSON file")
        parser.add_argument("--out", help="directory for report files")
        parser.add_argument("--seed", type=int)
        parser.add_argument("--tol-rank", type=float, dest="tol_rank")
        parser.add_argument("--tol-loc", type=float, dest="tol_loc")
        parser.add_argument("--step", help='Euler step size or "auto"')
        parser.add_argument("--max-steps", type=int, dest="max_steps")
        parser.add_argument("--conv-tol", type=float, dest="conv_tol")
        parser.add_argument("--record-every", type=int, dest="record_every")
        parser.add_argument(
            "--max-angle",
            type=float,
            nargs="+",
            dest="max_angle",
            help="largest perturbation angle (radians); several values sweep",
        )
        parser.add_argument("--angles-file", dest="angles_file")
        parser.add_argument("--trials", type=int, default=1)
        parser.add_argument("--nodewise", action="store_true")
        parser.add_argument("--emit-matrices", action="store_true", dest="emit_matrices")

    def handle(self, *args, **options):
        command = options["bearing_command"]
        if options.get("step") not in (None, "auto"):
            try:
                options["step"] = float(options["step"])
            except ValueError:
                raise CommandError(
                    f"--step must be a number or 'auto', got {options['step']!r}",
                    returncode=EXIT_MALFORMED,
                )
        try:
            config = RunConfig.from_options(command, options)
        except ValueError as exc:
            raise CommandError(str(exc), returncode=EXIT_MALFORMED)

        try:
            spec, _, digest = load_network(config.input)
            handler = getattr(self, f"run_{command}")
            body, returncode = handler(config, spec)
        except BearingNetworkError as exc:
            logger.error("%s failed: %s", command, exc)
            raise CommandError(f"{exc.code}: {exc}", returncode=exit_code_for(exc))

        report = envelope(config, digest, body)
        if config.out is not None:
            write_json(report, config.out / f"{command}.json")
        self.stdout.write(dumps(report))
        if returncode:
            raise CommandError(
                f"{command} finished with exit code {returncode}", returncode=returncode
            )

    def run_check(self, config, spec):
        report = classify(spec, rank_tol=config.rank_tol, loc_tol=config.loc_tol)
        self._emit_matrices(config, spec)
        return {"report": report.to_dict()}, VERDICT_EXIT[report.verdict]

    def run_solve(self, config, spec):
        return {"solution": solve_network(spec, config.loc_tol)}, 0

    def run_simulate(self, config, spec):
        angles = load_angles(config.angles_file) if config.angles_file else None
        max_angle = config.max_angles[0] if config.max_angles else None
        trajectory, summary = simulate_network(
            spec,
            config.flow,
            seed=config.seed,
            angles=angles,
            max_angle=max_angle,
            nodewise=config.nodewise,
        )
        if config.out is not None:
            index_map = spec.require_index_map()
            write_trajectory_csv(trajectory, index_map, config.out / "trajectory.csv")
        returncode = 0 if trajectory.converged else EXIT_STEP_LIMIT
        return {"summary": summary}, returncode

    def run_perturb(self, config, spec):
        angles = load_angles(config.angles_file) if config.angles_file else None
        max_angles = config.max_angles or ((0.1,) if angles is None else ())
        result = sweep(
            spec,
            max_angles=max_angles,
            trials=config.trials,
            seed=config.seed,
            angles=angles,
            loc_tol=config.loc_tol,
        )
        return {"sensitivity": result}, 0

    def run_rigidity(self, config, spec):
        self._emit_matrices(config, spec)
        return {"rigidity": summarize(spec, config.rank_tol)}, 0

    def _emit_matrices(self, config, spec):
        if not config.emit_matrices or config.out is None:
            return
        laplacian = bearing_laplacian(spec)
        write_matrix_csv(laplacian.matrix, config.out / "bearing_laplacian.csv")
        if spec.has_positions:
            R = rigidity_matrix(spec).matrix
        else:
            R = projected_incidence(laplacian)
        write_matrix_csv(R, config.out / "rigidity_matrix.csv")
