"""Route deployment for mobile multi-block waste containers.

Core surface:

* `network`    -- street graphs, all-pairs shortest distances, bundled nets
* `instance`   -- problem instances, seeded generation, serialization
* `packing`    -- block requirements and container configurations
* `routing`    -- greedy construction under the fixed/adapted strategies
* `exact`      -- small-instance branch-and-bound and solution validation
* `experiments`-- reproducible benchmark harness with CSV/JSON reports
* `cli`        -- `ecoroutes` command-line entry point
"""

__version__ = "1.0.0"

INSTANCE_FORMAT_VERSION = 1
SOLUTION_FORMAT_VERSION = 1
