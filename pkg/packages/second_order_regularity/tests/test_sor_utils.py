# packages/second_order_regularity/tests/test_sor_utils.py

"""Exit-code mapping, thread pools and logging helpers."""

import logging

import pytest

from second_order_regularity.utils.errors import (
    BranchCutError,
    CompatibilityError,
    ConfigError,
    ContourError,
    MatrixFormatError,
    NotSectorialError,
    SingularPencilError,
    SingularSystemError,
    UnsupportedParametersError,
    ZeroNormError,
    exit_code_for,
)
from second_order_regularity.utils.logging import LOGGER_NAME, log_banner, log_mapping, log_msg, setup_logger
from second_order_regularity.utils.parallel import chunk_slices, map_ordered, thread_count


class TestErrors:
    @pytest.mark.parametrize(
        "exc, code",
        [
            (ConfigError("x"), 4),
            (MatrixFormatError("x"), 4),
            (CompatibilityError("x", defect=0.5), 3),
            (SingularPencilError("x", point=1j), 1),
            (ContourError("x"), 1),
            (RuntimeError("x"), 1),
        ],
    )
    def test_exit_codes(self, exc, code):
        assert exit_code_for(exc) == code

    def test_builtin_bases(self):
        assert issubclass(ConfigError, ValueError)
        assert issubclass(NotSectorialError, SingularSystemError)
        assert issubclass(BranchCutError, ArithmeticError)
        assert issubclass(ZeroNormError, ZeroDivisionError)
        assert issubclass(UnsupportedParametersError, ValueError)

    def test_payloads(self):
        assert CompatibilityError("x", defect=0.5).defect == 0.5
        assert SingularSystemError("x").point is None


class TestThreads:
    def test_env_cap(self, monkeypatch):
        monkeypatch.setenv("PARAB2_THREADS", "3")
        assert thread_count() == 3
        assert thread_count(8) == 3
        assert thread_count(2) == 2
        assert thread_count(0) == 1

    def test_default_cap(self, mocker):
        mocker.patch("second_order_regularity.utils.parallel.os.cpu_count", return_value=32)
        assert thread_count() == 8

    def test_blank_value_is_ignored(self, monkeypatch, mocker):
        monkeypatch.setenv("PARAB2_THREADS", " ")
        mocker.patch("second_order_regularity.utils.parallel.os.cpu_count", return_value=2)
        assert thread_count() == 2

    @pytest.mark.parametrize("raw", ["0", "-2", "four", "1.5"])
    def test_invalid(self, monkeypatch, raw):
        monkeypatch.setenv("PARAB2_THREADS", raw)
        with pytest.raises(ConfigError):
            thread_count()

    @pytest.mark.parametrize(
        "total, chunks, expected",
        [(10, 3, [(0, 3), (3, 7), (7, 10)]), (2, 5, [(0, 1), (1, 2)]), (0, 4, []), (4, 0, [(0, 4)])],
    )
    def test_chunk_slices(self, total, chunks, expected):
        assert [(s.start, s.stop) for s in chunk_slices(total, chunks)] == expected

    def test_map_ordered_keeps_input_order(self, monkeypatch):
        monkeypatch.setenv("PARAB2_THREADS", "4")
        assert map_ordered(lambda i: i * i, range(50), max_workers=4, progress=True, desc="squares") == [
            i * i for i in range(50)
        ]

    def test_map_ordered_serial(self, monkeypatch):
        monkeypatch.setenv("PARAB2_THREADS", "1")
        assert map_ordered(str, [3, 1, 2], max_workers=4) == ["3", "1", "2"]

    def test_map_ordered_propagates_errors(self, monkeypatch):
        monkeypatch.setenv("PARAB2_THREADS", "2")

        def work(i):
            if i == 3:
                raise ContourError("bad node")
            return i

        with pytest.raises(ContourError):
            map_ordered(work, range(6), max_workers=2)


class TestLogging:
    def test_setup_logger_writes_one_file(self, tmp_path):
        logger = setup_logger(tmp_path, command="check")
        logger.info("hello")
        setup_logger(tmp_path, command="check")
        assert logger.name == LOGGER_NAME
        assert len(logger.handlers) == 1
        logs = list(tmp_path.glob("run_check_*.log"))
        assert logs
        assert any("INFO | hello" in p.read_text(encoding="utf-8") for p in logs)

    def test_default_location(self, isolated_dirs):
        logger = setup_logger(command="solve", verbose=True)
        assert logger.verbose is True
        assert list((isolated_dirs / "logs" / "second_order_regularity").glob("run_solve_*.log"))

    def test_log_msg_levels_and_echo(self, mocker, capsys):
        logger = mocker.Mock(spec=logging.Logger)
        log_msg("careful", logger, level="warning")
        logger.warning.assert_called_once_with("careful")
        assert capsys.readouterr().out == ""
        log_msg("shown", None, echo_console=True)
        assert "shown" in capsys.readouterr().out

    def test_forced_messages_always_print(self, capsys):
        log_msg("summary", None, force=True)
        assert capsys.readouterr().out.strip() == "summary"

    def test_banner(self, mocker, capsys):
        logger = mocker.Mock(spec=logging.Logger)
        log_banner("parab2 check", logger, width=10)
        assert [c.args[0] for c in logger.info.call_args_list] == ["=" * 10, "parab2 check", "=" * 10]
        assert capsys.readouterr().out.strip() == "parab2 check"

    def test_mapping(self, mocker):
        logger = mocker.Mock(spec=logging.Logger)
        log_mapping("Run settings:", {"phi2": 1.6207963267948966, "threads": 4}, logger)
        lines = [c.args[0] for c in logger.info.call_args_list]
        assert lines == ["Run settings:", "\tphi2    : 1.6208", "\tthreads : 4"]
