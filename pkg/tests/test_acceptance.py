"""Acceptance suite: every contract-level target at its stated tolerance.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them all).
The workloads are the full pinned scales, so this module takes a few minutes.
"""

import pytest

from assoc_ustat.verification import CHECKS, CheckResult, CheckScales

SCALES = CheckScales()


def _report(result: CheckResult) -> None:
    status = "PASS" if result.passed else "FAIL"
    print(
        f"[{status}] {result.name}: observed={result.observed:.6g} "
        f"({result.target}) [{result.runtime_s:.1f}s] {result.detail}",
        flush=True,
    )
    assert result.passed, f"{result.name}: {result.detail} (observed {result.observed:.6g})"


def test_01_hoeffding_identity():
    _report(CHECKS["hoeffding_identity"](SCALES))


def test_02_degenerate_components():
    _report(CHECKS["degeneracy"](SCALES))


def test_03_variance_asymptotics():
    _report(CHECKS["variance_asymptotics"](SCALES))


@pytest.mark.parametrize(
    "case",
    ["clt_variance_iid", "clt_variance_ar1", "clt_squared_mean_ar1", "clt_third_moment_iid"],
)
def test_04_central_limit_theorem(case):
    _report(CHECKS[case](SCALES))


@pytest.mark.parametrize("case", ["bn_consistency_iid", "bn_consistency_ar1"])
def test_05_block_estimator_consistency(case):
    _report(CHECKS[case](SCALES))


def test_06_nonmonotone_plugin():
    _report(CHECKS["nonmonotone_plugin"](SCALES))


def test_07_fluctuation_law():
    _report(CHECKS["fluctuation_law"](SCALES))


def test_08_wiener_constant():
    _report(CHECKS["wiener_constant"](SCALES))


def test_09_structural_invariants():
    _report(CHECKS["structural"](SCALES))
