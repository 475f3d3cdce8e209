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

import itertools
import json

import pytest

import attrfl


SMALL = {
    "dataset__num_classes": 4,
    "dataset__input_dim": 6,
    "dataset__samples_per_class": 200,
    "partition__num_clients": 4,
    "partition__samples_per_client": 80,
    "fl__rounds": 4,
    "attack__latent_steps": 2,
    "attack__synthetic_batch": 8,
}


def test_normalize_and_rank():
    assert attrfl.normalize_shares([-1.0, 0.0, 3.0]) == pytest.approx([0.0, 0.2, 0.8])
    assert attrfl.normalize_shares([5.0, 5.0, 5.0]) == pytest.approx([1 / 3] * 3)
    assert attrfl.rank_clients([0.4, 0.4, 0.2]) == [1, 2, 3]


def test_shapley_two_player_example():
    table = [0.0, 1.0, 2.0, 4.0]
    assert attrfl.shapley_exact(2, lambda m: table[m]) == pytest.approx([1.5, 2.5])
    assert attrfl.shapley_bruteforce(table, 2) == pytest.approx([1.5, 2.5])


def test_shapley_exact_matches_bruteforce():
    values = [((m * 2654435761) % 1000) / 1000.0 for m in range(32)]
    exact = attrfl.shapley_exact(5, lambda m: values[m])
    brute = attrfl.shapley_bruteforce(values, 5)
    for a, b in zip(exact, brute):
        assert abs(a - b) <= 1e-12
    mc = attrfl.shapley_mc(5, lambda m: values[m], 64, 3)
    assert mc == attrfl.shapley_mc(5, lambda m: values[m], 64, 3)


def test_random_guess_baseline():
    assert attrfl.random_guess_f1(10, 1, {4}) == pytest.approx(0.10)


def test_default_config_round_trips():
    text = attrfl.default_config()
    assert "fl.rounds" in text
    assert attrfl.config_hash(text) == attrfl.config_hash()
    assert len(attrfl.config_hash()) == 16


def test_bad_config_key_raises():
    with pytest.raises(ValueError):
        attrfl.run_experiment(no__such__key=1)


def test_run_experiment_small():
    report = attrfl.run_experiment(**SMALL)
    assert report["run_id"] == "desk"
    assert 0 <= report["malicious_client"] < 4
    for ev in report["evaluations"]:
        for phase in ("attack_free", "attacked"):
            assert sum(ev[phase]["shares"]) == pytest.approx(1.0)
    again = attrfl.run_experiment(**SMALL)
    assert json.dumps(again, sort_keys=True) == json.dumps(report, sort_keys=True)


def test_zero_intensity_matches_attack_free():
    report = attrfl.run_experiment(attack__intensity=0, **SMALL)
    assert report["utility"]["U0"] == report["utility"]["U1"]
    for ev in report["evaluations"]:
        assert ev["attack_free"]["raw"] == ev["attacked"]["raw"]


def test_csv_header():
    assert attrfl.CSV_HEADER.split(",") == ["run_id", "evaluator", "client_id", "raw", "share", "rank", "phase"]
