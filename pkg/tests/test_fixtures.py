"""Tests for the worked-example fixtures."""

from fairpool.fixtures import FIXTURES, FixtureResult, run_fixture_examples, to_tap


class TestFixtures:
    """Test cases for fixture evaluation and TAP output."""

    def test_all_pass(self) -> None:
        """Every worked example evaluates to its stated values."""
        results = run_fixture_examples()
        assert len(results) == len(FIXTURES)
        failed = [r for r in results if not r.passed]
        assert failed == []

    def test_tap(self) -> None:
        """TAP version 13 header, plan line and numbered results."""
        lines = to_tap(run_fixture_examples())
        assert lines[0] == "TAP version 13"
        assert lines[1] == f"1..{len(FIXTURES)}"
        assert lines[2].startswith("ok 1 - ")
        assert len(lines) == len(FIXTURES) + 2

    def test_failed_line(self) -> None:
        """Failures carry their detail as a TAP comment."""
        result = FixtureResult("pplns example awards", False, "expected (0), got (1)")
        assert result.tap(3) == "not ok 3 - pplns example awards # expected (0), got (1)"
        assert FixtureResult("x", True, "ignored").tap(1) == "ok 1 - x"
