import json
import sys
from unittest import mock

import pandas as pd
import pytest

from ppmon.cli._utils import EXIT_OK, EXIT_USAGE
from ppmon.cli.entrypoint import main_cli
from ppmon.evaluation import REPORT_COLUMNS
from ppmon.log import serialize_csv
from ppmon.log.tests._utils import outcome_log
from ppmon.ltl import parse_formula


class TestEntrypoint:
    """Integration tests that check that entrypoint calls pass through correctly.
    Full coverage of individual entrypoint calls is in test_cli.py.
    """

    @pytest.fixture(autouse=True)
    def clear_argv(self):
        # Required to clear argv in case Pytest is called on this specific function.
        # Otherwise, clogs parser.parse_known_args() in argparse
        sys.argv = [""]

    @pytest.fixture
    def log_path(self, tmp_path):
        path = tmp_path / "log.csv"
        path.write_text(serialize_csv(outcome_log(n_traces=20, seed=1)), "utf-8")
        return path

    def write_config(self, tmp_path, values):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(values), encoding="utf-8")
        return str(path)

    @mock.patch("ppmon.cli._train._train_file")
    def test_train_works_as_expected(self, train_file_mock, log_path):
        """
        Intended as a unit test to make sure,
        given 'train' as the first argument,
        the parser is configured correctly
        """
        args = ["train", "--log", str(log_path), "--formula", 'F("ok")']
        args += ["--out", "model.ppmon"]

        assert main_cli(args) == EXIT_OK
        train_file_mock.assert_called_once()
        config = train_file_mock.call_args.args[1]
        assert (config.instance, config.gap, config.max_length) == ("mbased_dt", 5, 21)

    def test_no_command(self, capsys):
        assert main_cli([]) == EXIT_USAGE
        assert "usage: ppmon" in capsys.readouterr().err

    def test_unknown_command(self):
        assert main_cli(["predict"]) == EXIT_USAGE

    @pytest.mark.parametrize(
        "command", ["label", "train", "evaluate", "sweep", "serve", "inspect"]
    )
    def test_help(self, command, capsys):
        assert main_cli([command, "--help"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "--config" in out
        assert "--verbose" in out

    def test_help_lists_defaults(self, capsys):
        main_cli(["sweep", "--help"])
        out = " ".join(capsys.readouterr().out.split())
        assert "[0.6, 0.7, 0.8, 0.9]" in out
        assert "[3, 5, 10]" in out

    @mock.patch("ppmon.cli._train._train_file")
    def test_config_file_sets_options(self, train_file_mock, log_path, tmp_path):
        config = self.write_config(
            tmp_path,
            {
                "formula": 'F("ok") && !F("fail")',
                "instance": "dbscan_dt",
                "eps": 0.3,
                "gap": 3,
                "out": "model.ppmon",
            },
        )
        args = ["train", "--log", str(log_path), "--config", config, "--gap", "4"]

        assert main_cli(args) == EXIT_OK
        training_config = train_file_mock.call_args.args[1]
        assert training_config.instance == "dbscan_dt"
        assert training_config.eps == 0.3
        # the command line wins over the file
        assert training_config.gap == 4
        assert training_config.formula == parse_formula('F("ok") && !F("fail")')

    @mock.patch("ppmon.cli._evaluate.sweep")
    def test_config_file_wraps_single_values(self, sweep_mock, log_path, tmp_path):
        sweep_mock.return_value = pd.DataFrame(columns=REPORT_COLUMNS)
        config = self.write_config(
            tmp_path, {"formula": 'F("ok")', "min_prob": 0.8, "gap": 2}
        )

        assert main_cli(["evaluate", "--log", str(log_path), "--config", config]) == 0
        configs, min_probs = sweep_mock.call_args.args[2:]
        assert [c.gap for c in configs] == [2]
        assert min_probs == [0.8]

    def test_config_file_provides_required_options(self, log_path, tmp_path):
        out = tmp_path / "model.ppmon"
        config = self.write_config(
            tmp_path, {"formula": 'F("ok")', "k_min": 1, "k_max": 1, "out": str(out)}
        )

        assert main_cli(["train", "--log", str(log_path), "--config", config]) == 0
        assert out.exists()

    @pytest.mark.parametrize(
        "content",
        ['{"formula": ', "[1, 2]", '{"no_such_option": 1}'],
        ids=["invalid JSON", "not an object", "unknown option"],
    )
    def test_bad_config_file(self, content, log_path, tmp_path, capsys):
        path = tmp_path / "config.json"
        path.write_text(content, encoding="utf-8")
        args = ["label", "--log", str(log_path), "--config", str(path)]

        assert main_cli(args) == EXIT_USAGE
        assert str(path) in capsys.readouterr().err

    def test_missing_config_file(self, log_path, tmp_path):
        args = ["label", "--log", str(log_path), "--config", str(tmp_path / "no")]
        assert main_cli(args) == EXIT_USAGE
