# services/errors.py
"""Error hierarchy shared by every pluq service.

Each error carries a stable ``code`` used in the one-line machine readable
reason printed by the CLI, and the process ``exit_code``.
"""
from __future__ import annotations

from typing import Optional, Sequence


class PluqError(Exception):
    """Base class of all engine failures"""

    code = "pluq_error"
    exit_code = 1

    def __init__(self, message: str = ""):
        super().__init__(message)
        self.message = message or self.code

    def reason(self) -> str:
        return f"error {self.code}: {self.message}"


class DivisionByZero(PluqError):
    code = "division_by_zero"


class OutNotMember(PluqError):
    code = "out_not_member"


class SizeMismatch(PluqError):
    code = "size_mismatch"


class BadIndices(PluqError):
    code = "bad_indices"


class InadmissibleI(PluqError):
    code = "inadmissible_index_set"


class ShapeMismatch(PluqError):
    code = "shape_mismatch"


class NotAPartition(PluqError):
    code = "not_a_partition"


class LabeledTermsPresent(PluqError):
    code = "labeled_terms_present"


class Disconnected(PluqError):
    code = "disconnected"


class Inconsistent(PluqError):
    code = "inconsistent"
    exit_code = 2


class EmptyImage(PluqError):
    code = "empty_image"
    exit_code = 3


class ValidationError(PluqError):
    code = "validation"

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParseError(PluqError):
    code = "parse"

    def __init__(self, message: str, line: int, column: int, expected: Sequence[str] = ()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        text = f"{line}:{column}: {message}"
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(text)


# ────────────────────────── sentinels ──────────────────────────

class _Sentinel:
    __slots__ = ()
    _name = "sentinel"

    def __repr__(self) -> str:
        return self._name

    def __bool__(self) -> bool:
        return False


class Zero(_Sentinel):
    """Result of a sort or replacement that produced a repeated index"""
    _name = "ZERO"


class NotLinear(_Sentinel):
    """Result of a linear extraction on a polynomial of higher degree"""
    _name = "NOT_LINEAR"


ZERO = Zero()
NOT_LINEAR = NotLinear()
