import pytest

from ssfrac.verify import SUITES, Check, format_table, run_suite


class TestSuites:
    @pytest.mark.parametrize("name", sorted(SUITES))
    def test_suite_passes(self, name):
        rows = run_suite(name)
        assert rows
        failed = [r for r in rows if not r.passed]
        assert not failed, format_table(failed)

    def test_tolerance_override(self):
        rows = run_suite("scaling", tol=1e-300)
        assert not all(r.passed for r in rows)


class TestCheck:
    def test_nan_fails(self):
        assert not Check("s", "n", float("nan"), 1.0).passed

    def test_table(self):
        text = format_table([Check("power", "x", 1e-9, 1e-8), Check("power", "y", 1.0, 1e-8)])
        lines = text.splitlines()
        assert lines[1].endswith("PASS") and lines[2].endswith("FAIL")
