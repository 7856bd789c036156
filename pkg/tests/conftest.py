"""Shared test configuration.

Move validation inside the incremental workspace is O(cells) per step, so the
library ships with it off.  Tests turn it on globally: every greedy run,
random-order build-up and restricted dismantle executed anywhere in the suite
re-checks the exactly-d rule against a recomputed degree table at each step.
"""

from hypothesis import settings

import dismantler.engine

dismantler.engine.DEBUG_VALIDATE = True

# first calls into jitted kernels pay compile/dispatch latency; wall-clock
# deadlines would flag those spuriously
settings.register_profile("no_deadline", deadline=None)
settings.load_profile("no_deadline")
