"""
Achievable-rate experiment route
"""
import argparse
import logging

from pydantic import ValidationError

from models.errors import ConfigError
from models.schemas import ArrayLayout
from routes.base import CommandRouter, argument, emit, load_experiment, require_layout
from services.channel_service import rate_experiment

logger = logging.getLogger(__name__)

router = CommandRouter()

RATE_HEADER = ["snr_db", "scheme", "mean_rate_bps_hz", "stderr", "n_seeds"]


@router.command(
    "rate",
    help="Monte-Carlo achievable rate of the concentric-ring, far-field and matched-filter beamformers",
    arguments=[
        argument("--seeds", type=int, default=None, help="number of channel draws (default: experiment.seeds)"),
        argument("--distance-range", nargs=2, type=float, metavar=("MIN_M", "MAX_M"), default=None,
                 help="path distance range in metres"),
    ],
)
def rate(args: argparse.Namespace) -> None:
    config = load_experiment(args)
    geometry = config.geometry.to_geometry()
    require_layout(geometry, ArrayLayout.UCA, command="rate")

    updates = {}
    if args.seeds is not None:
        updates["seeds"] = args.seeds
    if args.distance_range is not None:
        updates["distance_range_m"] = tuple(args.distance_range)
    try:
        experiment = config.experiment.model_validate({**config.experiment.model_dump(), **updates})
    except ValidationError as e:
        raise ConfigError(f"invalid rate override: {e.errors()[0]['msg']}") from e

    analysis = config.analysis
    logger.info(
        "Rate experiment: %d seeds from seed %d, %d paths in [%g, %g] m",
        experiment.seeds, experiment.seed, experiment.paths, *experiment.distance_range_m,
    )
    rows = rate_experiment(geometry, analysis.correlation_threshold, analysis.r_min_m, experiment,
                           analysis.ring_spacing)
    table = [[row.snr_db, row.scheme, row.mean_rate_bps_hz, row.stderr, row.n_seeds] for row in rows]
    emit(args, config, "rate", RATE_HEADER, table, {"seed": experiment.seed, "paths": experiment.paths})
