"""Named validity checks with measured residuals.

Reports carry residual magnitudes, not just booleans, so tolerance policy
lives in one place and failures are auditable.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a single named check.

    ``residual`` is the measured violation (most-negative eigenvalue for
    positivity checks, max absolute deviation for equality checks); the check
    passes when the residual does not exceed ``tolerance``.
    """

    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass(frozen=True)
class ValidityReport:
    checks: tuple[CheckResult, ...]

    @property
    def valid(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            out.append(f"{status}  {c.name}: residual {c.residual:.3e} (tol {c.tolerance:.0e})")
        return out
