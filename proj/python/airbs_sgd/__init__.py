"""Non-cooperative AirBS placement by stochastic gradient ascent."""

import json as _json

from ._core import (  # noqa: F401
    CoincidentPointsError,
    InvalidArgument,
    IoError,
    dbm_to_linear,
    free_space_power_dbm,
    free_space_power_gradient,
    kmeans_placement,
    linear_to_dbm,
    network_utility,
    network_utility_gradient,
    reference_scenario_json,
    run_scenario,
    sigmoid_delta,
    sigmoid_delta_deriv,
    smooth_max_dbm,
    softmax_weights,
    user_utility,
    user_utility_partials,
)


def reference_scenario():
    """Built-in 7 km picocell scenario as a dict."""
    return _json.loads(reference_scenario_json())


def run(scenario, seed=None):
    """Run a scenario given as a dict or JSON string."""
    text = scenario if isinstance(scenario, str) else _json.dumps(scenario)
    return run_scenario(text, seed)
