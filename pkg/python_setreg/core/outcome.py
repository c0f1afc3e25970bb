"""
Outcome type for per-set results of batch runs.

A batch evaluation must keep going when one set fails, so each set's result
is captured as a value: ``Registered`` wraps the produced result and
``Failed`` wraps the exception, both tagged with the set id.
"""

from abc import ABC, abstractmethod
from typing import Any, Callable, Generic, TypeVar

T = TypeVar("T")


class Outcome(ABC, Generic[T]):
    """Abstract base class for the result of processing one image set."""

    def __init__(self, set_id: str):
        self.set_id = set_id

    @abstractmethod
    def is_success(self) -> bool:
        """Check if the set was processed without error."""
        pass

    @abstractmethod
    def get(self) -> T:
        """Get the value, re-raising the captured exception if Failed."""
        pass

    @abstractmethod
    def error_message(self) -> str:
        """One-line description of the failure; empty for a success."""
        pass


class Registered(Outcome[T]):
    """A set that was processed successfully."""

    def __init__(self, set_id: str, value: T):
        super().__init__(set_id)
        self._value = value

    def is_success(self) -> bool:
        return True

    def get(self) -> T:
        return self._value

    def error_message(self) -> str:
        return ""

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Registered):
            return False
        return self.set_id == other.set_id and self._value == other._value

    def __repr__(self) -> str:
        return f"Registered({self.set_id!r}, {self._value!r})"


class Failed(Outcome[T]):
    """A set whose processing raised an exception."""

    def __init__(self, set_id: str, exception: Exception):
        super().__init__(set_id)
        self._exception = exception

    def is_success(self) -> bool:
        return False

    def get(self) -> T:
        raise self._exception

    def error_message(self) -> str:
        text = str(self._exception).splitlines()[0] if str(self._exception) else ""
        return f"{type(self._exception).__name__}: {text}"

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Failed):
            return False
        return (
            self.set_id == other.set_id
            and isinstance(self._exception, type(other._exception))
            and str(self._exception) == str(other._exception)
        )

    def __repr__(self) -> str:
        return f"Failed({self.set_id!r}, {self._exception!r})"


def attempt(set_id: str, func: Callable[[], T]) -> Outcome[T]:
    """Run ``func`` for one set, returning Registered or Failed."""
    try:
        return Registered(set_id, func())
    except Exception as e:
        return Failed(set_id, e)
