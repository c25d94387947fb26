import numpy as np

from common.errors import ContractViolation
from simulator.domain.report import RunReport, Summary

JCT_PERCENTILES = (50, 90, 99)
UTILIZATION_PERCENTILES = tuple(range(0, 101, 5))


def _weights(report: RunReport) -> tuple[np.ndarray, np.ndarray]:
    if not report.samples:
        raise ContractViolation("utilization needs at least one sample")
    times, fractions = (np.array(column, dtype=float) for column in zip(*report.samples))
    weights = np.append(np.diff(times), 0.0)
    if weights.sum() <= 0:
        # Everything happened at one instant; the last state is all there is.
        weights = np.zeros_like(fractions)
        weights[-1] = 1.0
    return fractions, weights


def utilization_cdf(report: RunReport) -> list[tuple[float, float]]:
    """Time-weighted CDF of the busy fraction: (fraction, cumulative weight) steps."""
    fractions, weights = _weights(report)
    levels, inverse = np.unique(fractions, return_inverse=True)
    mass = np.bincount(inverse, weights=weights, minlength=len(levels))
    cumulative = np.cumsum(mass) / mass.sum()
    return [
        (float(level), float(cum)) for level, cum, m in zip(levels, cumulative, mass) if m > 0
    ]


def cdf_percentile(cdf: list[tuple[float, float]], q: float) -> float:
    """Smallest level whose cumulative weight reaches q percent."""
    for level, cumulative in cdf:
        if cumulative >= q / 100 - 1e-12:
            return level
    return cdf[-1][0]


def mean_utilization(report: RunReport) -> float:
    fractions, weights = _weights(report)
    return float(np.average(fractions, weights=weights))


def jct_percentile(values: list[float], q: float) -> float:
    """Nearest-rank percentile."""
    return float(np.percentile(values, q, method="inverted_cdf"))


def aggregate(reports: list[RunReport]) -> Summary:
    """
    Per-run statistics averaged over runs. JCT percentiles come only from
    runs that completed at least one job.
    """
    if not reports:
        raise ContractViolation("aggregate needs at least one report")

    with_jobs = [report for report in reports if report.jcts]
    jct = {
        q: float(np.mean([jct_percentile(report.jcts, q) for report in with_jobs])) if with_jobs else 0.0
        for q in JCT_PERCENTILES
    }

    sampled = [report for report in reports if report.samples]
    curves = [
        [cdf_percentile(utilization_cdf(report), q) for q in UTILIZATION_PERCENTILES]
        for report in sampled
    ]
    mean_curve = np.mean(curves, axis=0) if curves else np.zeros(len(UTILIZATION_PERCENTILES))

    return Summary(
        policy=reports[0].policy,
        spec=reports[0].spec,
        runs=len(reports),
        mean_jcr=float(np.mean([report.jcr for report in reports])),
        jct=jct,
        jct_runs=len(with_jobs),
        mean_utilization=float(np.mean([mean_utilization(r) for r in sampled])) if sampled else 0.0,
        utilization=[(q, float(v)) for q, v in zip(UTILIZATION_PERCENTILES, mean_curve)],
    )
