"""Serialization of models, rankings, and comparisons.

Three formats per artifact: JSON (full precision, machine-readable), CSV
(full precision, chart-ready), and aligned text tables with numbers to
3 decimals for reading. All emitters are deterministic: same object in,
same bytes out.
"""

import csv
import io
import json
import math


def _num(x):
    """Full-precision, locale-free decimal text for CSV cells."""
    return repr(float(x))


def _clean(x):
    """Make a value JSON-safe; non-finite floats become null."""
    if x is None or isinstance(x, (str, bool, int)):
        return x
    x = float(x)
    return x if math.isfinite(x) else None


def to_json_text(payload):
    """Canonical JSON encoding used for every .json artifact."""
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _csv_text(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _factor_headers(k):
    return [f"factor_{j}" for j in range(1, k + 1)]


# ---------------------------------------------------------------------------
# factor model


def factor_model_payload(model):
    return {
        "indicator_names": list(model.indicator_names),
        "eigenvalues": [_clean(v) for v in model.eigenvalues],
        "retained": int(model.retained),
        "variance_explained": _clean(model.variance_explained),
        "kmo": {
            "overall": _clean(model.kmo),
            "label": model.kmo_label,
            "per_variable": [_clean(v) for v in model.kmo_per_variable],
        },
        "loadings_unrotated": [[_clean(v) for v in row] for row in model.loadings_unrotated],
        "loadings_rotated": [[_clean(v) for v in row] for row in model.loadings_rotated],
        "rotation": [[_clean(v) for v in row] for row in model.rotation],
        "communalities": [_clean(v) for v in model.communalities],
        "score_coefficients": [[_clean(v) for v in row] for row in model.score_coefficients],
        "rotation_method": model.rotation_method,
        "rotation_converged": bool(model.rotation_converged),
    }


def loadings_csv(model):
    """Rotated loadings, variables as rows and factors as columns."""
    rows = [["variable"] + _factor_headers(model.retained)]
    for name, row in zip(model.indicator_names, model.loadings_rotated):
        rows.append([name] + [_num(v) for v in row])
    return _csv_text(rows)


def eigenvalues_csv(model):
    p = len(model.eigenvalues)
    rows = [["component", "eigenvalue", "proportion", "cumulative"]]
    cumulative = 0.0
    for i, value in enumerate(model.eigenvalues, start=1):
        share = float(value) / p
        cumulative += share
        rows.append([str(i), _num(value), _num(share), _num(cumulative)])
    return _csv_text(rows)


def communalities_csv(model):
    rows = [["variable", "communality"]]
    for name, value in zip(model.indicator_names, model.communalities):
        rows.append([name, _num(value)])
    return _csv_text(rows)


def score_coefficients_csv(model):
    rows = [["variable"] + _factor_headers(model.retained)]
    for name, row in zip(model.indicator_names, model.score_coefficients):
        rows.append([name] + [_num(v) for v in row])
    return _csv_text(rows)


def factor_model_text(model):
    lines = []
    p = len(model.indicator_names)
    lines.append("Factor model")
    lines.append("=" * 12)
    lines.append(f"Variables: {p}")
    lines.append(f"Retained factors: {model.retained}")
    lines.append(
        f"Variance explained by retained factors: "
        f"{100.0 * model.variance_explained:.1f}%"
    )
    lines.append(f"KMO sampling adequacy: {model.kmo:.3f} ({model.kmo_label})")
    if not model.rotation_converged:
        lines.append("WARNING: rotation did not converge; loadings are best-iterate")
    lines.append("")
    lines.append("Eigenvalues")
    lines.append("component  eigenvalue  proportion  cumulative")
    cumulative = 0.0
    for i, value in enumerate(model.eigenvalues, start=1):
        share = float(value) / p
        cumulative += share
        lines.append(f"{i:>9d}  {value:>10.3f}  {share:>10.3f}  {cumulative:>10.3f}")
    lines.append("")
    title = "Rotated loadings" if model.rotation_method != "none" else "Loadings"
    lines.append(f"{title} (communality in last column)")
    name_width = max(len("variable"), max(len(n) for n in model.indicator_names))
    header = ["variable".ljust(name_width)]
    header += [h.rjust(9) for h in _factor_headers(model.retained)]
    header.append("communality".rjust(12))
    lines.append("  ".join(header))
    for name, row, h2 in zip(model.indicator_names, model.loadings_rotated,
                             model.communalities):
        cells = [name.ljust(name_width)]
        cells += [f"{v:>9.3f}" for v in row]
        cells.append(f"{h2:>12.3f}")
        lines.append("  ".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# ranking


def top_loading_variables(model, factor, count=3):
    """The ``count`` variables loading strongest (by magnitude) on a factor."""
    column = model.loadings_rotated[:, factor - 1]
    order = sorted(range(len(column)), key=lambda i: (-abs(float(column[i])), i))
    return [(model.indicator_names[i], float(column[i])) for i in order[:count]]


def ranking_payload(ranked, model=None):
    payload = {
        "factor": int(ranked.factor),
        "direction": ranked.direction,
        "entries": [
            {"rank": e.rank, "case_id": e.case_id, "score": _clean(e.score)}
            for e in ranked.entries
        ],
        "group_size": None if ranked.group_size is None else int(ranked.group_size),
        "group1_ids": list(ranked.group1_ids),
        "group2_ids": list(ranked.group2_ids),
    }
    if model is not None:
        payload["top_loadings"] = [
            {"variable": name, "loading": _clean(value)}
            for name, value in top_loading_variables(model, ranked.factor)
        ]
    return payload


def ranking_csv(ranked):
    rows = [["rank", "case_id", "score"]]
    for e in ranked.entries:
        rows.append([str(e.rank), e.case_id, _num(e.score)])
    return _csv_text(rows)


def ranking_text(ranked, model=None):
    lines = [f"Ranking on factor {ranked.factor} ({ranked.direction})"]
    if model is not None:
        strongest = ", ".join(
            f"{name} ({value:.3f})"
            for name, value in top_loading_variables(model, ranked.factor)
        )
        lines.append(f"Largest loadings on this factor: {strongest}")
    lines.append("")
    width = max(len("Communities"), max(len(e.case_id) for e in ranked.entries))
    lines.append(f"{'Rank':>4} | Communities")
    lines.append("-" * (7 + width))
    for e in ranked.entries:
        lines.append(f"{e.rank:>4} | {e.case_id}")
    if ranked.group_size:
        lines.append("")
        lines.append(f"Group 1 (ranks 1-{ranked.group_size}): "
                     + ", ".join(ranked.group1_ids))
        n = ranked.n_cases
        lines.append(f"Group 2 (ranks {n - ranked.group_size + 1}-{n}): "
                     + ", ".join(ranked.group2_ids))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# group comparison


def _descriptives_payload(desc):
    return {
        "n": desc.n,
        "mean": _clean(desc.mean),
        "sd": _clean(desc.sd),
        "sem": _clean(desc.sem),
    }


def _ttest_payload(res):
    return {
        "t": _clean(res.t),
        "df": _clean(res.df),
        "p_two_tailed": _clean(res.p_two_tailed),
        "mean_difference": _clean(res.mean_difference),
        "se_difference": _clean(res.se_difference),
        "ci_low": _clean(res.ci_low),
        "ci_high": _clean(res.ci_high),
        "level": _clean(res.level),
        "variant": res.variant,
        "degenerate": bool(res.degenerate),
    }


def comparison_payload(report):
    variables = []
    for rec in report.variables:
        entry = {
            "name": rec.name,
            "group1": _descriptives_payload(rec.group1),
            "group2": _descriptives_payload(rec.group2),
            "degenerate": bool(rec.degenerate),
            "note": rec.note,
            "levene": None,
            "pooled": None,
            "welch": None,
            "reported_variant": rec.reported_variant,
            "significant": rec.significant,
            "significant_at_05": rec.significant_at_05,
            "significant_at_10": rec.significant_at_10,
        }
        if rec.levene is not None:
            entry["levene"] = {
                "F": _clean(rec.levene.F),
                "df1": rec.levene.df1,
                "df2": rec.levene.df2,
                "p": _clean(rec.levene.p),
                "center": rec.levene.center,
            }
        if rec.pooled is not None:
            entry["pooled"] = _ttest_payload(rec.pooled)
        if rec.welch is not None:
            entry["welch"] = _ttest_payload(rec.welch)
        variables.append(entry)
    return {
        "group1_ids": list(report.group1_ids),
        "group2_ids": list(report.group2_ids),
        "alpha": _clean(report.alpha),
        "alpha_levene": _clean(report.alpha_levene),
        "ci_level": _clean(report.ci_level),
        "standardize_scope": report.standardize_scope,
        "levene_center": report.levene_center,
        "variables": variables,
    }


def comparison_csv(report):
    rows = [[
        "variable", "variant", "reported",
        "group1_n", "group1_mean", "group1_sd", "group1_sem",
        "group2_n", "group2_mean", "group2_sd", "group2_sem",
        "levene_F", "levene_p",
        "t", "df", "p_two_tailed", "mean_difference", "se_difference",
        "ci_low", "ci_high", "significant_at_05", "significant_at_10",
        "degenerate", "note",
    ]]
    for rec in report.variables:
        base = [
            str(rec.group1.n), _num(rec.group1.mean), _num(rec.group1.sd),
            _num(rec.group1.sem),
            str(rec.group2.n), _num(rec.group2.mean), _num(rec.group2.sd),
            _num(rec.group2.sem),
        ]
        if rec.degenerate:
            rows.append([rec.name, "", ""] + base + [""] * 10
                        + ["true", rec.note or ""])
            continue
        levene = [_num(rec.levene.F), _num(rec.levene.p)]
        for res in (rec.pooled, rec.welch):
            rows.append(
                [rec.name, res.variant,
                 "true" if rec.reported_variant == res.variant else "false"]
                + base + levene
                + [_num(res.t), _num(res.df), _num(res.p_two_tailed),
                   _num(res.mean_difference), _num(res.se_difference),
                   _num(res.ci_low), _num(res.ci_high),
                   "true" if rec.significant_at_05 and rec.reported_variant == res.variant else "false",
                   "true" if rec.significant_at_10 and rec.reported_variant == res.variant else "false",
                   "false", ""]
            )
    return _csv_text(rows)


def comparison_text(report):
    lines = []
    lines.append("Group comparison")
    lines.append("=" * 16)
    lines.append(f"Group 1 ({len(report.group1_ids)}): " + ", ".join(report.group1_ids))
    lines.append(f"Group 2 ({len(report.group2_ids)}): " + ", ".join(report.group2_ids))
    lines.append(
        f"alpha = {report.alpha:g}; Levene alpha = {report.alpha_levene:g}; "
        f"CI level = {report.ci_level:g}; "
        f"standardization scope = {report.standardize_scope}; "
        f"Levene center = {report.levene_center}"
    )
    lines.append("")

    name_width = max(len("variable"), max(len(r.name) for r in report.variables))
    lines.append("Group statistics (raw units)")
    lines.append(
        f"{'variable'.ljust(name_width)}  group  {'N':>3}  {'mean':>12}  "
        f"{'sd':>12}  {'sem':>12}"
    )
    for rec in report.variables:
        for label, desc in (("1", rec.group1), ("2", rec.group2)):
            lines.append(
                f"{rec.name.ljust(name_width)}  {label:>5}  {desc.n:>3d}  "
                f"{desc.mean:>12.3f}  {desc.sd:>12.3f}  {desc.sem:>12.3f}"
            )
    lines.append("")

    lines.append("Levene's test and t-tests (standardized values)")
    lines.append(
        f"{'variable'.ljust(name_width)}  {'F':>8}  {'Sig.':>6}  variant  rep  "
        f"{'t':>8}  {'df':>7}  {'Sig.(2t)':>8}  {'mean diff':>10}  "
        f"{'se diff':>8}  {'ci low':>8}  {'ci high':>8}"
    )
    for rec in report.variables:
        if rec.degenerate:
            lines.append(
                f"{rec.name.ljust(name_width)}  degenerate: {rec.note}"
            )
            continue
        for res in (rec.pooled, rec.welch):
            marker = "*" if rec.reported_variant == res.variant else " "
            lines.append(
                f"{rec.name.ljust(name_width)}  {rec.levene.F:>8.3f}  "
                f"{rec.levene.p:>6.3f}  {res.variant:<7}  {marker:>3}  "
                f"{res.t:>8.3f}  {res.df:>7.3f}  {res.p_two_tailed:>8.3f}  "
                f"{res.mean_difference:>10.3f}  {res.se_difference:>8.3f}  "
                f"{res.ci_low:>8.3f}  {res.ci_high:>8.3f}"
            )
    lines.append("")
    lines.append("rep * = variant selected by Levene's test")
    significant = [r.name for r in report.variables if r.significant]
    lines.append(
        f"Significant at alpha {report.alpha:g}: "
        + (", ".join(significant) if significant else "none")
    )
    return "\n".join(lines) + "\n"
