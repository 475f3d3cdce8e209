# Copyright 2026 The attrfl Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the attrfl attribution-manipulation simulator."""

import json

from ._core import (
    CSV_HEADER,
    ConfigError,
    config_hash,
    default_config,
    normalize_shares,
    random_guess_f1,
    rank_clients,
    shapley_bruteforce,
    shapley_exact,
    shapley_mc,
)
from ._core import run_experiment as _run_experiment

__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "config_hash",
    "default_config",
    "normalize_shares",
    "random_guess_f1",
    "rank_clients",
    "run_experiment",
    "shapley_bruteforce",
    "shapley_exact",
    "shapley_mc",
]


def run_experiment(config="", **overrides):
    """Run one paired experiment and return the report as a dict.

    ``config`` is config-file text (empty for the default scenario). Keyword
    overrides use config keys with dots replaced by double underscores, e.g.
    ``fl__rounds=4``.
    """
    keys = {k.replace("__", "."): str(v) for k, v in overrides.items()}
    return json.loads(_run_experiment(config, keys))
