"""Tests for reports module."""

from autfa.reports import Failure, SuiteReport


class TestSuiteReport:
    """Tests for suite reports."""

    def test_record(self):
        """Test passing checks count but only failures are kept."""
        report = SuiteReport("demo")
        report.record("a", "1", True)
        report.record("b", "2", False, "mismatch")
        assert report.instances == 2
        assert not report.passed
        assert report.failures == [Failure("b", "2", "mismatch")]
        assert report.count_families() == {"b": 1}

    def test_merge(self):
        """Test merged reports sum instances and sort failures."""
        first = SuiteReport("demo", 3, [Failure("z", "1")], {"x": 1})
        second = SuiteReport("other", 2, [Failure("a", "9")], {"y": 2})
        merged = first.merge(second)
        assert merged.suite == "demo"
        assert merged.instances == 5
        assert [f.family for f in merged.failures] == ["a", "z"]
        assert merged.details == {"x": 1, "y": 2}

    def test_serialization(self):
        """Test dictionary round trip and deterministic key order."""
        failures = [Failure("b", "2", "d"), Failure("a", "1")]
        report = SuiteReport("demo", 4, failures, {"k": 1, "c": 2})
        data = report.to_dict()
        assert list(data["details"]) == ["c", "k"]
        assert data["failures"][0]["family"] == "a"
        assert SuiteReport.from_dict(data).to_dict() == data

    def test_summary(self):
        """Test the text rendering."""
        report = SuiteReport("demo", 1, [Failure("fam", "key", "detail")], {"bound": 6})
        lines = report.summary().splitlines()
        assert lines[0] == "demo: FAIL (1 instances, 1 failures)"
        assert "  bound: 6" in lines
        assert lines[-1] == "  - [fam] key: detail"
        assert SuiteReport("ok", 2).summary() == "ok: PASS (2 instances, 0 failures)"
