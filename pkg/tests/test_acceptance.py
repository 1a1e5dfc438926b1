"""One test per acceptance criterion; each prints a PASS/FAIL line.

Criteria whose printed values are not reproduced fail here on purpose; the
check detail shows the value the computation does reproduce.
"""

import json

import pytest

from irrper.checks import ALL_CHECKS, CheckConfig
from irrper.report import cjson

CFG = CheckConfig()


@pytest.mark.parametrize("check", ALL_CHECKS, ids=[f"C{i + 1}" for i in range(len(ALL_CHECKS))])
def test_criterion(check, capsys):
    chk = check(CFG)
    with capsys.disabled():
        print(f"\n{chk.line()} ({chk.seconds:.1f} s)")
    assert chk.passed, json.dumps(cjson(chk.detail), indent=1, sort_keys=True)
