"""Theorem sweeps and Monte-Carlo-versus-analytic cross-validation.

Each check walks a parameter grid, asserts the corresponding rigorous
bound (or statistical agreement) at every point, and returns a
``CheckReport`` carrying the worst observed margin.  A failing point
records enough data (inputs, computed values, margins) to reproduce the
failure in isolation.  Reports are deterministic given their grid and,
for the Monte Carlo check, the campaign seeds.

Margin convention: positive distance to the binding constraint; a
negative margin is a violation.  Bound checks run on exact rationals
wherever the quantity is rational and at >= 30 decimal digits
otherwise, so float roundoff can never fake a verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
from mpmath import mp

from . import analytic
from .exactmath import DEFAULT_DIGITS, EULER_GAMMA_50
from .partition import FactorList, disjoint
from .sampler import EstimateResult, SampleSpec, estimate

_GUARD = 10


@dataclass
class CheckReport:
    """Outcome of one verification sweep."""

    name: str
    grid: str
    points: int
    worst_margin: float
    worst_point: str
    passed: bool
    failures: list[dict] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        head = (
            f"{verdict} {self.name}: {self.points} points on {self.grid}; "
            f"worst margin {self.worst_margin:.3e} at {self.worst_point}"
        )
        if not self.passed:
            head += f"; {len(self.failures)} violation(s)"
        return head

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "grid": self.grid,
            "points": self.points,
            "worst_margin": self.worst_margin,
            "worst_point": self.worst_point,
            "passed": self.passed,
            "failures": self.failures,
            "notes": self.notes,
        }


class _MarginTracker:
    def __init__(self) -> None:
        self.worst = float("inf")
        self.where = "none"

    def update(self, margin: float, where: str) -> None:
        if margin < self.worst:
            self.worst = margin
            self.where = where


# ---------------------------------------------------------------------------
# deficit interval
# ---------------------------------------------------------------------------


def check_delta_interval(
    m_max: int = 64, big_max: Optional[int] = None, digits: int = DEFAULT_DIGITS
) -> CheckReport:
    """Strict containment of the entropy deficit:
    Delta(m, M) in (-m/(2M), -(m-1)/(2M)) for all 2 <= m <= M, checked
    at >= 30-digit precision; the m = 1 row is exactly zero and is
    asserted separately."""
    big_max = m_max if big_max is None else big_max
    dps = digits + _GUARD
    tracker = _MarginTracker()
    failures: list[dict] = []
    points = 0
    for big in range(1, big_max + 1):
        points += 1
        if analytic.page_sen_entropy(1, big).exact != 0:
            failures.append({"m": 1, "M": big, "reason": "Delta(1, M) != 0"})
    with mp.workdps(dps):
        for m in range(2, m_max + 1):
            for big in range(m, big_max + 1):
                points += 1
                entropy = analytic.page_sen_entropy(m, big, dps)
                s = entropy.exact if entropy.exact is not None else entropy.nats
                delta = mpmath.mpmathify(s) - mpmath.ln(m)
                above_lo = delta - mpmath.mpmathify(Fraction(-m, 2 * big))
                below_hi = mpmath.mpmathify(Fraction(-(m - 1), 2 * big)) - delta
                margin = float(min(above_lo, below_hi))
                where = f"(m={m}, M={big})"
                tracker.update(margin, where)
                if not (above_lo > 0 and below_hi > 0):
                    failures.append(
                        {
                            "m": m,
                            "M": big,
                            "delta": float(delta),
                            "lower": float(Fraction(-m, 2 * big)),
                            "upper": float(Fraction(-(m - 1), 2 * big)),
                            "margin": margin,
                        }
                    )
    return CheckReport(
        name="delta-interval",
        grid=f"2 <= m <= {m_max}, m <= M <= {big_max} (plus the m=1 row)",
        points=points,
        worst_margin=tracker.worst,
        worst_point=tracker.where,
        passed=not failures,
        failures=failures,
    )


# ---------------------------------------------------------------------------
# harmonic-number enclosures
# ---------------------------------------------------------------------------


def check_harmonic_bounds(n_max: int = 100_000, digits: int = DEFAULT_DIGITS) -> CheckReport:
    """All four harmonic enclosures plus monotonicity of the Havil
    residual, for every n <= n_max.

    Runs its own incremental high-precision summation of H_n, so it is
    independent of both the exact-rational path and the asymptotic
    series used elsewhere.  The cumulative rounding error of the sweep
    (about n * 10**-dps) is astronomically below the tightest margin
    tested (about 1e-11 at n = 1e5).
    """
    dps = digits + _GUARD
    tracker = _MarginTracker()
    failures: list[dict] = []
    family_worst: dict[str, float] = {}

    def update(family: str, margin: float, n: int, **data) -> None:
        where = f"(n={n}, {family})"
        tracker.update(margin, where)
        if margin < family_worst.get(family, float("inf")):
            family_worst[family] = margin
        if margin <= 0:
            failures.append({"n": n, "family": family, "margin": margin, **data})

    with mp.workdps(dps):
        gamma = mpmath.mpf(EULER_GAMMA_50)
        one = mpmath.mpf(1)
        h = mpmath.mpf(0)
        prev_eps = None
        for n in range(1, n_max + 1):
            h += one / n
            ln_n = mpmath.ln(n)
            eps = h - gamma - ln_n
            lo = one / (2 * (n + 1))
            hi = one / (2 * n)
            update("havil", float(min(eps - lo, hi - eps)), n, epsilon=float(eps))
            if prev_eps is not None:
                update("monotone", float(prev_eps - eps), n, epsilon=float(eps))
            prev_eps = eps

            franel = 8 * n * n * (hi - eps)
            update("franel", float(min(franel, 1 - franel)), n, residual=float(franel))

            fourth = 120 * n**4 * (eps - hi + one / (12 * n * n))
            update("fourth-order", float(min(fourth, 1 - fourth)), n, residual=float(fourth))

            weak = h - ln_n
            if n == 1:
                if weak != 1:
                    update("weak", -abs(float(weak - 1)), n, residual=float(weak))
            else:
                update("weak", float(min(weak - one / n, 1 - weak)), n, residual=float(weak))
    return CheckReport(
        name="harmonic-bounds",
        grid=f"1 <= n <= {n_max}",
        points=n_max,
        worst_margin=tracker.worst,
        worst_point=tracker.where,
        passed=not failures,
        failures=failures,
        notes={"family_worst_margins": family_worst},
    )


# ---------------------------------------------------------------------------
# tripartite mutual-information ceiling
# ---------------------------------------------------------------------------


def check_tripartite_bound(
    na_max: int = 4, nb_max: int = 4, nc_max: int = 64
) -> CheckReport:
    """0 <= <I_{A:B}> <= n_a n_b / (2 n_c) <= 1/2 over the whole
    dominant-environment grid, as exact rational comparisons."""
    tracker = _MarginTracker()
    failures: list[dict] = []
    points = 0
    half = Fraction(1, 2)
    for n_a in range(1, na_max + 1):
        for n_b in range(1, nb_max + 1):
            for n_c in range(n_a * n_b, nc_max + 1):
                points += 1
                info = analytic.tripartite_avg_mutual_info(n_a, n_b, n_c).exact
                bound = analytic.tripartite_mutual_info_bound(n_a, n_b, n_c)
                margin = float(min(info, bound - info, half - bound))
                where = f"(n_a={n_a}, n_b={n_b}, n_c={n_c})"
                tracker.update(margin, where)
                if info < 0 or info > bound or bound > half:
                    failures.append(
                        {
                            "n_a": n_a,
                            "n_b": n_b,
                            "n_c": n_c,
                            "info": str(info),
                            "bound": str(bound),
                            "margin": margin,
                        }
                    )
    return CheckReport(
        name="tripartite-bound",
        grid=f"n_a <= {na_max}, n_b <= {nb_max}, n_a n_b <= n_c <= {nc_max}",
        points=points,
        worst_margin=tracker.worst,
        worst_point=tracker.where,
        passed=not failures,
        failures=failures,
    )


# ---------------------------------------------------------------------------
# Monte Carlo agreement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CampaignEntry:
    """One Monte Carlo spec with its closed-form oracle."""

    spec: SampleSpec
    oracle: object  # Fraction or mpmath.mpf
    stderr_ceiling: float
    label: str


def analytic_oracle(spec: SampleSpec):
    """The closed-form mean for a sample spec, or None when the package
    has no exact expression for it (concurrence, negativity, Renyi, and
    Tsallis of order != 2; mutual information outside the
    dominant-environment regime)."""
    factors = spec.factors
    if spec.quantity == "mutual_info":
        n_a, n_b = spec.sel_a.kept_dim, spec.sel_b.kept_dim
        rest = factors.total // (n_a * n_b)
        if n_a * n_b > rest:
            return None
        return analytic.tripartite_avg_mutual_info(n_a, n_b, rest).exact
    kept, comp = spec.keep.kept_dim, spec.keep.complement_dim
    if spec.quantity == "entropy":
        value = analytic.multipartite_collection_entropy(factors, spec.keep)
        return value.exact if value.exact is not None else value.nats
    if spec.quantity == "purity":
        return analytic.avg_purity(kept, comp)
    if spec.quantity == "tangle":
        return analytic.avg_tangle(kept, comp)
    if spec.quantity == "tsallis" and float(spec.q) == 2.0:
        return analytic.avg_tangle(kept, comp) / 2
    return None


def default_campaign() -> tuple[CampaignEntry, ...]:
    """The standard cross-validation campaign: every quantity with a
    closed form, at desk-scale sample counts and pinned seeds."""
    two_two = FactorList((2, 2))
    three_five = FactorList((3, 5))
    tri = FactorList((2, 2, 4))
    return (
        CampaignEntry(
            SampleSpec(two_two, "entropy", 200_000, 20_220, keep=two_two.select([0])),
            analytic.page_sen_entropy(2, 2).exact,
            stderr_ceiling=2e-3,
            label="entropy 2x2 vs 1/3",
        ),
        CampaignEntry(
            SampleSpec(three_five, "purity", 100_000, 35, keep=three_five.select([0])),
            analytic.avg_purity(3, 5),
            stderr_ceiling=2e-3,
            label="purity 3x5 vs 1/2",
        ),
        CampaignEntry(
            SampleSpec(two_two, "tangle", 100_000, 2_240, keep=two_two.select([0])),
            analytic.avg_tangle(2, 2),
            stderr_ceiling=4e-3,
            label="tangle 2x2 vs 2/5",
        ),
        CampaignEntry(
            SampleSpec(
                tri,
                "mutual_info",
                100_000,
                224,
                sel_a=tri.select([0]),
                sel_b=tri.select([1]),
            ),
            analytic.tripartite_avg_mutual_info(2, 2, 4).exact,
            stderr_ceiling=4e-3,
            label="mutual information 2x2x4 vs closed form",
        ),
    )


def check_mc_agreement(
    campaign: Optional[Sequence[CampaignEntry]] = None,
    workers: int = 1,
    z_max: float = 4.0,
) -> CheckReport:
    """Monte Carlo versus closed form: each entry passes iff its
    z-score |mean - oracle| / stderr is at most ``z_max`` (default 4,
    false-alarm probability ~6e-5 per entry) and the standard error is
    below the entry's ceiling."""
    entries = tuple(campaign) if campaign is not None else default_campaign()
    tracker = _MarginTracker()
    failures: list[dict] = []
    details: list[dict] = []
    for entry in entries:
        result: EstimateResult = estimate(entry.spec, workers=workers)
        oracle = float(entry.oracle)
        if result.stderr > 0:
            z = abs(result.mean - oracle) / result.stderr
        else:
            z = 0.0 if result.mean == oracle else float("inf")
        margin = min(z_max - z, entry.stderr_ceiling - result.stderr)
        tracker.update(margin, entry.label)
        record = {
            "label": entry.label,
            "quantity": result.quantity,
            "samples": result.samples,
            "seed": result.seed,
            "mean": result.mean,
            "stderr": result.stderr,
            "oracle": str(entry.oracle),
            "z": z,
            "stderr_ceiling": entry.stderr_ceiling,
        }
        details.append(record)
        if z > z_max or result.stderr > entry.stderr_ceiling:
            failures.append(record)
    return CheckReport(
        name="mc-agreement",
        grid=f"{len(entries)} campaign entries",
        points=len(entries),
        worst_margin=tracker.worst,
        worst_point=tracker.where,
        passed=not failures,
        failures=failures,
        notes={"entries": details},
    )


# ---------------------------------------------------------------------------
# stated approximation slacks
# ---------------------------------------------------------------------------


def check_approximation_slacks(
    na_max: int = 4, nb_max: int = 4, nc_max: int = 64, digits: int = DEFAULT_DIGITS
) -> CheckReport:
    """The three stated approximation slacks over the
    dominant-environment grid, at the analytic level:

    * sum rule: one-sided informations of A and B plus the pure-state
      mutual-information surrogate (twice either subsystem entropy)
      reproduce ln(n_a n_b) to within 3/2 nat;
    * pair sum: <S_A> + <S_B> agrees with <S_C> to within 1 nat;
    * entropy-sum formula: the dimension-only approximation to
      <S_A + S_B + S_C> is good to within 3/2 nat.
    """
    dps = digits + _GUARD
    tracker = _MarginTracker()
    failures: list[dict] = []
    family_worst: dict[str, float] = {}
    points = 0

    def update(family: str, slack: float, dev: float, point: str, **data) -> None:
        margin = slack - dev
        tracker.update(margin, f"({point}, {family})")
        if margin < family_worst.get(family, float("inf")):
            family_worst[family] = margin
        if margin < 0:
            failures.append({"point": point, "family": family, "deviation": dev, **data})

    with mp.workdps(dps):
        for n_a in range(1, na_max + 1):
            for n_b in range(1, nb_max + 1):
                for n_c in range(n_a * n_b, nc_max + 1):
                    points += 1
                    point = f"n_a={n_a}, n_b={n_b}, n_c={n_c}"
                    s_a = analytic.page_sen_entropy(n_a, n_b * n_c, dps).nats
                    s_b = analytic.page_sen_entropy(n_b, n_a * n_c, dps).nats
                    s_c = analytic.page_sen_entropy(n_c, n_a * n_b, dps).nats

                    # Sum rule with the pure-state identity I = 2S taken
                    # from either side; both residuals equal |S_A - S_B|.
                    t_ab = mpmath.ln(n_a) - s_a
                    t_ba = mpmath.ln(n_b) - s_b
                    dev = float(
                        abs(t_ab + t_ba + 2 * s_a - mpmath.ln(n_a * n_b))
                    )
                    update("sum-rule", 1.5, dev, point)

                    dev = float(abs(s_a + s_b - s_c))
                    update("pair-sum", 1.0, dev, point)

                    approx = analytic.tripartite_entropy_sum_approx(n_a, n_b, n_c, dps)
                    dev = float(abs((s_a + s_b + s_c) - approx.nats))
                    update("entropy-sum", 1.5, dev, point)
    return CheckReport(
        name="approximation-slacks",
        grid=f"n_a <= {na_max}, n_b <= {nb_max}, n_a n_b <= n_c <= {nc_max}",
        points=points,
        worst_margin=tracker.worst,
        worst_point=tracker.where,
        passed=not failures,
        failures=failures,
        notes={"family_worst_margins": family_worst},
    )


ALL_CHECKS = {
    "delta-interval": check_delta_interval,
    "harmonic": check_harmonic_bounds,
    "tripartite-bound": check_tripartite_bound,
    "mc-agreement": check_mc_agreement,
    "slacks": check_approximation_slacks,
}
