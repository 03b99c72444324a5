# Copyright 2026 The LGDP Stats Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Hypothesis tests with locally privatized group labels."""

import functools
import json

from . import _core
from ._core import (
        LgdpError,
        Mechanism,
        marginal_probabilities,
        mechanism,
        optimal_subset_k,
        privatize,
        verify_ldp,
)

__version__ = _core.__version__


def _decoded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return json.loads(fn(*args, **kwargs))

    return wrapper


prop_test = _decoded(_core.prop_test)
prop_ci = _decoded(_core.prop_ci)
independence_test = _decoded(_core.independence_test)
diff_means_test = _decoded(_core.diff_means_test)
diff_means_ci = _decoded(_core.diff_means_ci)
anova_test = _decoded(_core.anova_test)
pairwise_test = _decoded(_core.pairwise_test)
pairwise_ci = _decoded(_core.pairwise_ci)
ab_test = _decoded(_core.ab_test)
ab_ci = _decoded(_core.ab_ci)


def run_sweep(config):
    """Runs a sweep from a config dict (or JSON text) and returns a dict."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_core.run_sweep(text))


__all__ = [
        "LgdpError",
        "Mechanism",
        "ab_ci",
        "ab_test",
        "anova_test",
        "diff_means_ci",
        "diff_means_test",
        "independence_test",
        "marginal_probabilities",
        "mechanism",
        "optimal_subset_k",
        "pairwise_ci",
        "pairwise_test",
        "privatize",
        "prop_ci",
        "prop_test",
        "run_sweep",
        "verify_ldp",
]
