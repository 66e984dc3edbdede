"""Report types shared by the Monte Carlo estimators and the bundle checks.

Every report has a ``name``, a boolean ``passed`` and a ``to_text`` rendering
whose first line is ``<name>: PASS|FAIL`` followed by one line per entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri


def bonferroni_sigma(k_sigma: float, count: int) -> float:
    """Two-sided Gaussian band giving the family-wise level of ``k_sigma`` over ``count`` tests."""
    if count <= 1:
        return float(k_sigma)
    p = 2.0 * ndtr(-k_sigma)
    return float(ndtri(1.0 - p / (2.0 * count)))


def _fmt(v) -> str:
    v = complex(v)
    if v.imag == 0.0:
        return f"{v.real:.6g}"
    return f"{v.real:.6g}{v.imag:+.6g}j"


@dataclass
class EstimatorReport:
    """Elementwise Monte Carlo estimates confronted with targets at ``k_sigma``.

    ``k_sigma`` may differ per entry (0 makes the allowance the whole band).
    An entry passes when ``|estimate - target| <= k_sigma * standard_error + allowance``.
    ``allowance`` carries deterministic slack such as a truncation bias or a
    relative tolerance; it is zero unless a check sets it.
    """

    name: str
    estimate: np.ndarray
    standard_error: np.ndarray
    target: np.ndarray
    n_samples: int
    k_sigma: float | np.ndarray = 3.0
    provenance: str = ""
    allowance: np.ndarray | None = None
    labels: list = field(default_factory=list)
    flags: tuple = ()

    def __post_init__(self):
        self.estimate = np.atleast_1d(np.asarray(self.estimate))
        self.standard_error = np.atleast_1d(np.asarray(self.standard_error, float))
        self.k_sigma = np.broadcast_to(np.asarray(self.k_sigma, float), self.estimate.shape)
        self.target = np.broadcast_to(np.asarray(self.target), self.estimate.shape)
        allow = 0.0 if self.allowance is None else self.allowance
        self.allowance = np.broadcast_to(np.asarray(allow, float), self.estimate.shape)
        if not self.labels:
            self.labels = [str(i) for i in range(self.estimate.size)]

    @property
    def deviation(self) -> np.ndarray:
        return np.abs(self.estimate - self.target)

    @property
    def within(self) -> np.ndarray:
        return self.deviation <= self.k_sigma * self.standard_error + self.allowance

    @property
    def passed(self) -> bool:
        return bool(np.all(self.within))

    @property
    def z_scores(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            z = self.deviation / self.standard_error
        return np.where(self.deviation == 0.0, 0.0, z)

    def to_text(self) -> str:
        head = f"{self.name}: {'PASS' if self.passed else 'FAIL'}  n={self.n_samples}"
        if self.flags:
            head += "  flags=" + ",".join(self.flags)
        if self.provenance:
            head += f"  target={self.provenance}"
        lines = [head]
        for i, lab in enumerate(self.labels):
            lines.append(
                f"  {lab}  estimate={_fmt(self.estimate.flat[i])}  target={_fmt(self.target.flat[i])}"
                f"  se={self.standard_error.flat[i]:.3g}  k={self.k_sigma.flat[i]:.3g}  allowance={self.allowance.flat[i]:.3g}"
                f"  {'ok' if self.within.flat[i] else 'FAIL'}")
        return "\n".join(lines)


@dataclass
class VerificationReport:
    """Outcome of a batch of randomized identity checks."""

    name: str
    trials: int
    failures: int
    skipped: int
    max_residual: float
    tolerance: float
    failed_cases: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.trials > 0

    def to_text(self) -> str:
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}  trials={self.trials}"
                 f"  failures={self.failures}  skipped={self.skipped}"
                 f"  max_residual={self.max_residual:.3g}  tolerance={self.tolerance:.3g}"]
        for case in self.failed_cases[:10]:
            lines.append(f"  failed: {case}")
        return "\n".join(lines)
