"""Python front end for the fwrl C++ core."""

from ._fwrl import *  # noqa: F401,F403
from ._fwrl import (
    Direction,
    Environment,
    GridMap,
    RunConfig,
    ScenarioScript,
    bundled_map,
    bundled_maps,
    make_agent,
    parse_map,
    run_experiment,
    run_scenario,
)

ACTIONS = (Direction.Up, Direction.Down, Direction.Left, Direction.Right)
