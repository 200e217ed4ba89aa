"""Two-group statistics: descriptives, Levene's test, pooled and Welch t-tests.

The group comparison keeps the reporting convention of classic statistical
packages: descriptive statistics in the variable's original units, test
statistics on standardized values, both t-test variants computed with the
reported one chosen by Levene's test.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import dataset as ds_mod
from .errors import DegenerateDataError, ValidationError
from .numkernel import f_tail_p, t_quantile, t_two_tailed_p

_ZERO_SS = 1e-300


@dataclass(frozen=True)
class GroupDescriptives:
    n: int
    mean: float
    sd: float
    sem: float


@dataclass(frozen=True)
class LeveneResult:
    F: float
    df1: int
    df2: int
    p: float
    center: str


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: float
    p_two_tailed: float
    mean_difference: float
    se_difference: float
    ci_low: float
    ci_high: float
    level: float
    variant: str
    degenerate: bool = False


@dataclass(frozen=True)
class VariableComparison:
    """All statistics for one variable in a two-group comparison."""

    name: str
    group1: GroupDescriptives
    group2: GroupDescriptives
    levene: LeveneResult
    pooled: TTestResult
    welch: TTestResult
    reported_variant: str
    significant: bool
    significant_at_05: bool
    significant_at_10: bool
    degenerate: bool = False
    note: str = None


@dataclass(frozen=True)
class GroupComparisonReport:
    variables: tuple
    group1_ids: tuple
    group2_ids: tuple
    alpha: float
    alpha_levene: float
    ci_level: float
    standardize_scope: str
    levene_center: str


def _as_sample(values, minimum=2):
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size < minimum:
        raise ValidationError(f"need at least {minimum} observations, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("sample contains non-finite values")
    return arr


def group_descriptives(values):
    """n, mean, sample standard deviation, and standard error of the mean."""
    arr = _as_sample(values)
    n = arr.size
    sd = float(arr.std(ddof=1))
    return GroupDescriptives(n=n, mean=float(arr.mean()), sd=sd, sem=sd / math.sqrt(n))


def levene_test(g1, g2, center="mean"):
    """Levene's equality-of-variances test for two groups.

    One-way ANOVA on absolute deviations from each group's center
    (mean for the classic statistic, median for Brown-Forsythe).
    """
    if center not in ("mean", "median"):
        raise ValidationError(f"center must be 'mean' or 'median', got {center!r}")
    a = _as_sample(g1)
    b = _as_sample(g2)
    middle = np.mean if center == "mean" else np.median
    da = np.abs(a - middle(a))
    db = np.abs(b - middle(b))
    n1, n2 = da.size, db.size
    grand = (da.sum() + db.sum()) / (n1 + n2)
    ssb = n1 * (da.mean() - grand) ** 2 + n2 * (db.mean() - grand) ** 2
    ssw = float(np.sum((da - da.mean()) ** 2) + np.sum((db - db.mean()) ** 2))
    df1 = 1
    df2 = n1 + n2 - 2
    if ssw <= _ZERO_SS:
        raise DegenerateDataError(
            "Levene statistic undefined: no within-group spread in the deviations"
        )
    f = float(ssb / df1) / (ssw / df2)
    return LeveneResult(F=f, df1=df1, df2=df2, p=f_tail_p(f, df1, df2), center=center)


def _finish_t(delta, se, df, level, variant):
    if se == 0.0:
        if delta == 0.0:
            # Equal means, zero spread: report a null result rather than
            # aborting a multi-variable comparison.
            return TTestResult(
                t=0.0, df=df, p_two_tailed=1.0, mean_difference=0.0,
                se_difference=0.0, ci_low=0.0, ci_high=0.0,
                level=level, variant=variant, degenerate=True,
            )
        raise DegenerateDataError(
            f"{variant} t statistic undefined: zero variance in both groups "
            f"with unequal means (difference {delta:g})"
        )
    t = delta / se
    margin = t_quantile((1.0 + level) / 2.0, df) * se
    return TTestResult(
        t=float(t), df=float(df), p_two_tailed=float(t_two_tailed_p(t, df)),
        mean_difference=float(delta), se_difference=float(se),
        ci_low=float(delta - margin), ci_high=float(delta + margin),
        level=level, variant=variant,
    )


def t_test_pooled(g1, g2, level=0.95):
    """Equal-variances two-sample t-test with a confidence interval."""
    if not 0.0 < level < 1.0:
        raise ValidationError(f"confidence level must be in (0, 1), got {level!r}")
    a = _as_sample(g1)
    b = _as_sample(g2)
    n1, n2 = a.size, b.size
    df = n1 + n2 - 2
    pooled_var = ((n1 - 1) * a.var(ddof=1) + (n2 - 1) * b.var(ddof=1)) / df
    se = math.sqrt(pooled_var * (1.0 / n1 + 1.0 / n2))
    return _finish_t(float(a.mean() - b.mean()), se, df, level, "pooled")


def t_test_welch(g1, g2, level=0.95):
    """Unequal-variances (Welch) t-test with Satterthwaite degrees of freedom."""
    if not 0.0 < level < 1.0:
        raise ValidationError(f"confidence level must be in (0, 1), got {level!r}")
    a = _as_sample(g1)
    b = _as_sample(g2)
    n1, n2 = a.size, b.size
    va = a.var(ddof=1) / n1
    vb = b.var(ddof=1) / n2
    se2 = va + vb
    if se2 == 0.0:
        return _finish_t(float(a.mean() - b.mean()), 0.0, n1 + n2 - 2, level, "welch")
    df = se2 * se2 / (va * va / (n1 - 1) + vb * vb / (n2 - 1))
    return _finish_t(float(a.mean() - b.mean()), math.sqrt(se2), df, level, "welch")


def compare_groups(ds, group1_ids, group2_ids, variables=None, alpha=0.05,
                   alpha_levene=0.05, ci_level=0.95, standardize_scope="selected",
                   levene_center="mean"):
    """Per-variable two-group comparison over an indicator dataset.

    Descriptives are computed on raw values. Levene and both t-tests run on
    z-scores taken over ``standardize_scope``: ``"selected"`` standardizes
    over just the compared cases, ``"all"`` over the whole dataset. The
    reported variant is pooled when Levene's p exceeds ``alpha_levene``,
    Welch otherwise. A variable that is constant within the scope is marked
    degenerate and skipped; the rest of the report proceeds.
    """
    if standardize_scope not in ("selected", "all"):
        raise ValidationError(
            f"standardize_scope must be 'selected' or 'all', got {standardize_scope!r}"
        )
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must be in (0, 1), got {alpha!r}")
    if not 0.0 < alpha_levene < 1.0:
        raise ValidationError(f"alpha_levene must be in (0, 1), got {alpha_levene!r}")
    group1_ids = tuple(group1_ids)
    group2_ids = tuple(group2_ids)
    overlap = set(group1_ids) & set(group2_ids)
    if overlap:
        raise ValidationError(f"groups overlap: {sorted(overlap)}")
    if len(group1_ids) < 2 or len(group2_ids) < 2:
        raise ValidationError("each group needs at least 2 cases")
    known = set(ds.case_ids)
    unknown = (set(group1_ids) | set(group2_ids)) - known
    if unknown:
        raise ValidationError(f"unknown case id(s): {sorted(unknown)}")

    if variables is None:
        variables = ds.indicator_names
    sub = ds_mod.select_variables(ds, variables)

    row_of = {cid: i for i, cid in enumerate(sub.case_ids)}
    rows1 = [row_of[cid] for cid in group1_ids]
    rows2 = [row_of[cid] for cid in group2_ids]
    raw = sub.values

    if standardize_scope == "selected":
        scope_rows = rows1 + rows2
    else:
        scope_rows = list(range(raw.shape[0]))
    scope = raw[scope_rows, :]
    scope_means = scope.mean(axis=0)
    scope_sds = scope.std(axis=0, ddof=1)

    records = []
    for j, name in enumerate(sub.indicator_names):
        desc1 = group_descriptives(raw[rows1, j])
        desc2 = group_descriptives(raw[rows2, j])
        if scope_sds[j] <= 1e-12:
            records.append(VariableComparison(
                name=name, group1=desc1, group2=desc2, levene=None,
                pooled=None, welch=None, reported_variant=None,
                significant=None, significant_at_05=None, significant_at_10=None,
                degenerate=True,
                note="constant within the standardization scope",
            ))
            continue
        z = (raw[:, j] - scope_means[j]) / scope_sds[j]
        z1 = z[rows1]
        z2 = z[rows2]
        try:
            levene = levene_test(z1, z2, center=levene_center)
            pooled = t_test_pooled(z1, z2, level=ci_level)
            welch = t_test_welch(z1, z2, level=ci_level)
        except DegenerateDataError as exc:
            records.append(VariableComparison(
                name=name, group1=desc1, group2=desc2, levene=None,
                pooled=None, welch=None, reported_variant=None,
                significant=None, significant_at_05=None, significant_at_10=None,
                degenerate=True, note=str(exc),
            ))
            continue
        variant = "pooled" if levene.p > alpha_levene else "welch"
        reported = pooled if variant == "pooled" else welch
        records.append(VariableComparison(
            name=name, group1=desc1, group2=desc2, levene=levene,
            pooled=pooled, welch=welch, reported_variant=variant,
            significant=bool(reported.p_two_tailed < alpha),
            significant_at_05=bool(reported.p_two_tailed < 0.05),
            significant_at_10=bool(reported.p_two_tailed < 0.10),
        ))

    return GroupComparisonReport(
        variables=tuple(records),
        group1_ids=group1_ids,
        group2_ids=group2_ids,
        alpha=alpha,
        alpha_levene=alpha_levene,
        ci_level=ci_level,
        standardize_scope=standardize_scope,
        levene_center=levene_center,
    )
