"""
When the winner depends on the metric
=====================================

Two synthetic model variants: A is precise but skips many landmarks,
B finds every landmark but with more scatter. Averaging only over the
matched slices favours A. Charging missed points the corner bound
favours B.
"""

from landmark_metrics import (
    EvalConfig,
    divergence_scenario,
    evaluate_cohort,
    rank_variants,
    ranking_divergence,
)

gt, pred_a, pred_b = divergence_scenario(seed=2021)
print("%d cases, %d GT points" % (len(gt), sum(c.n_points for c in gt)))
print("A keeps %d points, B keeps %d" % (
    sum(c.n_points for c in pred_a), sum(c.n_points for c in pred_b)))

report = evaluate_cohort(gt, {"A": pred_a, "B": pred_b}, EvalConfig(strategies=("point",)))

# per variant summary, formatted the way a results table would show it
for method in ("slice", "slice-bounded"):
    for variant in ("A", "B"):
        agg = report.get(variant, "point", method, "d_ant")
        print("%-14s %s  |d|_ant = %s mm" % (method, variant, agg.format()))
for variant in ("A", "B"):
    print("TPR_ant %s = %s" % (variant, report.get(variant, "point", "", "tpr_ant").format()))

# the rankings disagree
by_slice = rank_variants(report, "d_ant", "point", "slice")
by_bound = rank_variants(report, "d_ant", "point", "slice-bounded")
print("slice ranking:  ", by_slice)
print("bounded ranking:", by_bound)
print(ranking_divergence(by_slice, by_bound))
