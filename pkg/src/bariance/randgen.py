"""Deterministic, seedable sampling from the two study populations.

The core generator is xoshiro256++ (a 64-bit shift/rotate generator),
seeded by expanding one 64-bit seed through the splitmix64 finalizer.
Bit-compatibility with other implementations is not a goal; every
cross-check against the generator is statistical.

Transforms:

* normal deviates use the Marsaglia polar method (rejection, no
  trigonometric calls) and cache the second deviate of each pair;
* gamma deviates use the Marsaglia-Tsang squeeze rejection for shape
  ``k >= 1``; shapes below 1 draw at ``k + 1`` and multiply by
  ``U**(1/k)`` (the standard boost), so every ``k > 0`` is handled by one
  code path.

Replication ``r`` of a study runs on its own generator seeded with
:func:`child_seed`, which mixes the base seed with ``r`` through the
splitmix64 finalizer; streams are independent and safe to evaluate in
parallel.  A single ``RngState`` instance is single-owner: do not share
one across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EmptySample, InvalidDistribution, ParseError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """splitmix64 finalizer: a 64-bit avalanche mix."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def child_seed(base_seed: int, index: int) -> int:
    """Seed for stream ``index`` derived from ``base_seed``.

    Distinct indices give decorrelated streams, so replications of a study
    can run independently and in any order.
    """
    return _mix64((int(base_seed) + (int(index) + 1) * _GOLDEN) & _MASK64)


class RngState:
    """xoshiro256++ generator state, owned by a single consumer.

    Two instances constructed from equal seeds produce identical draw
    sequences (per implementation; this is the reproducibility contract).
    """

    __slots__ = ("seed", "_s0", "_s1", "_s2", "_s3", "_spare")

    def __init__(self, seed: int):
        seed = int(seed) & _MASK64
        self.seed = seed
        sm = seed
        limbs = []
        for _ in range(4):
            sm = (sm + _GOLDEN) & _MASK64
            limbs.append(_mix64(sm))
        if not any(limbs):  # xoshiro forbids the all-zero state
            limbs[0] = _GOLDEN
        self._s0, self._s1, self._s2, self._s3 = limbs
        self._spare = None

    def next_uint64(self) -> int:
        s0 = self._s0
        s1 = self._s1
        s2 = self._s2
        s3 = self._s3
        x = (s0 + s3) & _MASK64
        result = (((x << 23) | (x >> 41)) + s0) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        self._s0 = s0
        self._s1 = s1
        self._s2 = s2
        self._s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        return result

    def random(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_uint64() >> 11) * 1.1102230246251565e-16  # 2**-53

    def index_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) via 64-bit multiply-shift."""
        return (self.next_uint64() * bound) >> 64

    def normal(self) -> float:
        """Standard normal deviate (polar rejection, second deviate cached)."""
        spare = self._spare
        if spare is not None:
            self._spare = None
            return spare
        while True:
            u = 2.0 * self.random() - 1.0
            v = 2.0 * self.random() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                break
        factor = math.sqrt(-2.0 * math.log(s) / s)
        self._spare = v * factor
        return u * factor

    def standard_gamma(self, k: float) -> float:
        """Gamma(k, 1) deviate for any shape ``k > 0``."""
        if not (k > 0.0):
            raise InvalidDistribution(f"gamma shape must be positive, got {k!r}")
        boost = 1.0
        if k < 1.0:
            u = self.random()
            while u <= 0.0:
                u = self.random()
            boost = u ** (1.0 / k)
            k = k + 1.0
        d = k - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        while True:
            x = self.normal()
            v = 1.0 + c * x
            if v <= 0.0:
                continue
            v = v * v * v
            u = self.random()
            x2 = x * x
            if u < 1.0 - 0.0331 * x2 * x2:
                return boost * d * v
            if u <= 0.0:  # log(0) would fail; reject and redraw
                continue
            if math.log(u) < 0.5 * x2 + d * (1.0 - v + math.log(v)):
                return boost * d * v


@dataclass(frozen=True)
class DistributionSpec:
    """Normal(mu, sigma2) or Gamma(shape k, scale theta) population.

    Construct through :meth:`normal` or :meth:`gamma`, which validate the
    parameters; both families have closed-form mean and variance.
    """

    family: str
    p1: float
    p2: float

    @staticmethod
    def normal(mu: float, sigma2: float) -> "DistributionSpec":
        if not (sigma2 > 0.0) or not math.isfinite(sigma2) or not math.isfinite(mu):
            raise InvalidDistribution(
                f"normal requires finite mu and sigma2 > 0, got ({mu!r}, {sigma2!r})"
            )
        return DistributionSpec("normal", float(mu), float(sigma2))

    @staticmethod
    def gamma(shape_k: float, scale_theta: float) -> "DistributionSpec":
        if not (shape_k > 0.0 and scale_theta > 0.0):
            raise InvalidDistribution(
                f"gamma requires k > 0 and theta > 0, got ({shape_k!r}, {scale_theta!r})"
            )
        return DistributionSpec("gamma", float(shape_k), float(scale_theta))

    def moments(self) -> tuple[float, float]:
        """Closed-form (mean, variance) of the population."""
        if self.family == "normal":
            return self.p1, self.p2
        return self.p1 * self.p2, self.p1 * self.p2 * self.p2

    def fourth_central_moment(self) -> float:
        """Closed-form E[(X - mu)^4], used for variance-of-variance bands."""
        _, var = self.moments()
        if self.family == "normal":
            return 3.0 * var * var
        return (3.0 + 6.0 / self.p1) * var * var

    def spec_string(self) -> str:
        return f"{self.family}:{self.p1:g},{self.p2:g}"


def moments(dist: DistributionSpec) -> tuple[float, float]:
    """Population (mean, variance) for a distribution spec."""
    return dist.moments()


def sample(dist: DistributionSpec, n: int, rng: RngState) -> list[float]:
    """Draw ``n`` i.i.d. values, advancing ``rng`` deterministically."""
    if n < 1:
        raise EmptySample(f"sample size must be >= 1, got {n}")
    out = []
    if dist.family == "normal":
        mu = dist.p1
        sigma = math.sqrt(dist.p2)
        for _ in range(n):
            out.append(mu + sigma * rng.normal())
    elif dist.family == "gamma":
        k = dist.p1
        theta = dist.p2
        for _ in range(n):
            out.append(theta * rng.standard_gamma(k))
    else:
        raise InvalidDistribution(f"unknown family {dist.family!r}")
    return out


def parse_distribution(text: str) -> DistributionSpec:
    """Parse ``normal:MU,SIGMA2`` or ``gamma:K,THETA`` flag syntax."""
    try:
        family, params = text.strip().lower().split(":", 1)
        a, b = (float(tok) for tok in params.split(","))
    except ValueError as exc:
        raise ParseError(
            f"cannot parse distribution {text!r}; expected normal:MU,SIGMA2 "
            "or gamma:K,THETA"
        ) from exc
    if family == "normal":
        return DistributionSpec.normal(a, b)
    if family == "gamma":
        return DistributionSpec.gamma(a, b)
    raise ParseError(f"unknown distribution family {family!r}")
