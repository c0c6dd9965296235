"""The thirteen acceptance checks, one test each; every test prints its
pass/fail line (visible with ``pytest -s`` or in the captured output)."""

import pytest

from gsf.acceptance import CRITERIA, run_one


@pytest.mark.parametrize("number", [n for n, _, _ in CRITERIA], ids=[f"criterion_{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(number, tmp_path):
    res = run_one(number, seed=0, trace_dir=str(tmp_path))
    print(res.line())
    assert res.passed, res.line()
