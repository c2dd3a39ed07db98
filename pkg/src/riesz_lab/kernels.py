"""Interaction kernels for Riesz and log gases.

The pair interaction is g(x) = |x|^(-s) in the Riesz and Coulomb cases and
g(x) = -log|x| in the one- and two-dimensional log cases (stored with the
convention s = 0).  Each admissible (case, d, s) determines the extension
dimension k, the weight exponent gamma of the extended operator
div(|y|^gamma grad .), the normalizing constant c_ds of its fundamental
solution, and alpha = (d - s)/2, the order of the induced fractional
Laplacian on the flat side.
"""

import math
from dataclasses import dataclass

from .errors import DomainError

CASES = ("riesz", "log1d", "log2d", "coulomb")


@dataclass(frozen=True)
class KernelSpec:
    case: str
    d: int
    s: float
    k: int
    gamma: float
    c_ds: float
    alpha: float

    @property
    def is_log(self) -> bool:
        return self.case in ("log1d", "log2d")

    def as_dict(self) -> dict:
        return {
            "case": self.case,
            "d": self.d,
            "s": self.s,
            "k": self.k,
            "gamma": self.gamma,
            "c_ds": self.c_ds,
            "alpha": self.alpha,
        }


def _c_ds(case: str, d: int, s: float) -> float:
    if case in ("log1d", "log2d"):
        return 2.0 * math.pi
    if case == "coulomb":
        return (d - 2) * 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)
    # k = 1 branch, max(0, d-2) < s < d
    return 2.0 * s * 2.0 * math.pi ** (d / 2.0) * math.gamma((s + 2 - d) / 2.0) \
        / math.gamma((s + 2) / 2.0)


def make_kernel(case: str, d: int, s: float = 0.0) -> KernelSpec:
    """Build the kernel descriptor for one of the admissible cases.

    riesz requires max(0, d-2) < s < d, coulomb requires s = d-2 >= 1,
    log1d requires d = 1 and log2d requires d = 2 (both store s = 0).
    """
    if case not in CASES:
        raise DomainError(f"unknown kernel case {case!r}, expected one of {CASES}")
    if d < 1 or int(d) != d:
        raise DomainError(f"dimension must be a positive integer, got {d}")
    d = int(d)

    if case == "log1d":
        if d != 1:
            raise DomainError("log1d kernel requires d = 1")
        s, k, gamma = 0.0, 1, 0.0
    elif case == "log2d":
        if d != 2:
            raise DomainError("log2d kernel requires d = 2")
        s, k, gamma = 0.0, 0, 0.0
    elif case == "coulomb":
        if d < 3 or s != d - 2:
            raise DomainError("coulomb kernel requires s = d - 2 >= 1")
        k, gamma = 0, 0.0
    else:
        if not max(0.0, d - 2.0) < s < d:
            raise DomainError(
                f"riesz exponent must satisfy max(0, d-2) < s < d, got s={s}, d={d}"
            )
        k, gamma = 1, s - d + 2 - 1

    alpha = (d - s) / 2.0
    # d - 2 + k + gamma = s must hold exactly in all cases
    assert abs((d - 2 + k + gamma) - s) == 0.0
    return KernelSpec(case=case, d=d, s=float(s), k=k, gamma=float(gamma),
                      c_ds=_c_ds(case, d, s), alpha=alpha)


def g_eval(spec: KernelSpec, r: float) -> float:
    """Kernel value at distance r > 0."""
    if r <= 0.0:
        raise DomainError(f"kernel argument must be positive, got r={r}")
    if spec.is_log:
        return -math.log(r)
    # log-space evaluation; overflows saturate to +inf for tiny r
    try:
        return math.exp(-spec.s * math.log(r))
    except OverflowError:
        return math.inf


def g_truncated(spec: KernelSpec, r: float, eta: float) -> float:
    """Kernel truncated at level g(eta): min(g(r), g(eta))."""
    _check_eta(eta)
    return min(g_eval(spec, r), g_eval(spec, eta))


def f_eta(spec: KernelSpec, r: float, eta: float) -> float:
    """Truncation remainder (g(r) - g(eta))_+, supported on r < eta."""
    _check_eta(eta)
    return max(g_eval(spec, r) - g_eval(spec, eta), 0.0)


def _check_eta(eta: float) -> None:
    if not 0.0 < eta < 1.0:
        raise DomainError(f"truncation radius must lie in (0, 1), got eta={eta}")
