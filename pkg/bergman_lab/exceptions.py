"""bergman-lab exception hierarchy."""

from __future__ import annotations


class BergmanLabError(Exception):
    """Base exception for all bergman-lab errors."""


class DomainError(BergmanLabError, ValueError):
    """Raised when an argument lies outside the domain of an operation."""

    def __init__(self, name: str, value: object, detail: str = "") -> None:
        self.name = name
        self.value = value
        self.detail = detail
        msg = f"{name}={value!r} is outside the admissible domain"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class WeightClassError(BergmanLabError):
    """Raised when a weight specification fails the class-W requirements."""

    def __init__(self, alpha: float, reason: str) -> None:
        self.alpha = alpha
        self.reason = reason
        super().__init__(f"weight with alpha={alpha!r} is not admissible: {reason}")


class QuadratureError(BergmanLabError):
    """Raised when adaptive quadrature fails to reach its tolerance.

    ``index`` is the moment degree being computed, or ``None`` for a generic
    integral.
    """

    def __init__(self, abs_err: float, panels: int, index: int | None = None) -> None:
        self.index = index
        self.abs_err = abs_err
        self.panels = panels
        where = f" for n={index}" if index is not None else ""
        super().__init__(
            f"quadrature did not converge{where}: abs_err={abs_err:.3e} after {panels} panels"
        )


class TruncationError(BergmanLabError):
    """Raised when the kernel series needs more terms than the configured cap."""

    def __init__(self, terms: int, tail_bound: float) -> None:
        self.terms = terms
        self.tail_bound = tail_bound
        super().__init__(
            f"kernel series not converged within {terms} terms "
            f"(relative tail bound {tail_bound:.3e})"
        )


class GeodesicError(BergmanLabError):
    """Raised when the polar graph cannot connect the query points."""


class SelfMapError(BergmanLabError):
    """Raised when a polynomial does not map the disk into itself."""

    def __init__(self, max_modulus: float, detail: str = "") -> None:
        self.max_modulus = max_modulus
        msg = f"not a self-map of the disk: max boundary modulus {max_modulus:.15g}"
        super().__init__(f"{msg} ({detail})" if detail else msg)


class BoundaryTouchError(SelfMapError):
    """Raised when |phi(z)| >= 1 at an interior evaluation point."""

    def __init__(self, point: complex, modulus: float) -> None:
        self.point = point
        super().__init__(modulus, f"image of {point!r} reaches the unit circle")


class HypothesisError(BergmanLabError):
    """Raised when a criterion is applied outside its hypotheses."""


class SpecParseError(BergmanLabError, ValueError):
    """Raised on malformed weight, map or config text."""

    def __init__(self, text: str, detail: str) -> None:
        self.text = text
        self.detail = detail
        super().__init__(f"cannot parse {text!r}: {detail}")
