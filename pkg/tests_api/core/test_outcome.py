"""Tests for the per-set Registered / Failed outcome type."""

import unittest

from python_setreg.core.errors import DatasetError
from python_setreg.core.outcome import Failed, Registered, attempt


class TestRegistered(unittest.TestCase):
    """A set that produced a result."""

    def test_get_and_message(self):
        """Test that a success returns its value and an empty message."""
        outcome = Registered("set01", 42)
        self.assertTrue(outcome.is_success())
        self.assertEqual(outcome.get(), 42)
        self.assertEqual(outcome.error_message(), "")
        self.assertEqual(outcome.set_id, "set01")

    def test_equality_by_id_and_value(self):
        """Test that successes compare by set id and value."""
        self.assertEqual(Registered("a", 1), Registered("a", 1))
        self.assertNotEqual(Registered("a", 1), Registered("a", 2))
        self.assertNotEqual(Registered("a", 1), Registered("b", 1))


class TestFailed(unittest.TestCase):
    """A set whose processing raised."""

    def test_get_reraises(self):
        """Test that get re-raises the captured exception itself."""
        error = DatasetError("truth.json is missing", path="set02")
        outcome = Failed("set02", error)
        self.assertFalse(outcome.is_success())
        with self.assertRaises(DatasetError) as ctx:
            outcome.get()
        self.assertIs(ctx.exception, error)

    def test_error_message_is_one_line(self):
        """Test that only the first line of the exception text is kept."""
        outcome = Failed("set02", ValueError("first line\nsecond line"))
        self.assertEqual(outcome.error_message(), "ValueError: first line")

    def test_equality_by_id_type_and_message(self):
        """Test that failures compare by set id, exception type and text."""
        self.assertEqual(Failed("a", ValueError("x")), Failed("a", ValueError("x")))
        self.assertNotEqual(Failed("a", ValueError("x")), Failed("b", ValueError("x")))
        self.assertNotEqual(Failed("a", ValueError("x")), Registered("a", "x"))


class TestAttempt(unittest.TestCase):
    """Capturing a callable's result or exception."""

    def test_success(self):
        """Test that a returning callable becomes Registered."""
        self.assertEqual(attempt("s", lambda: 3), Registered("s", 3))

    def test_failure_is_captured(self):
        """Test that a raising callable becomes Failed with its message."""

        def broken():
            raise DatasetError("no images")

        outcome = attempt("s", broken)
        self.assertIsInstance(outcome, Failed)
        self.assertEqual(outcome.error_message(), "DatasetError: no images")


if __name__ == "__main__":
    unittest.main()
