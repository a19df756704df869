"""Multi-seed significance analysis.

Experiments here train several seeds per configuration; comparing methods
then needs a two-sample test. The package ships Welch's t-test (unequal
variances, Welch-Satterthwaite degrees of freedom) built on its own
regularized incomplete beta function, plus a table builder that tests
every method against the best one per condition.
"""

import numpy as np

from chargate.stats import (
    SeedGroupResult,
    performance_correlation_matrix,
    significance_table,
    student_t_cdf,
    welch_t_test,
)

rng = np.random.default_rng(4)

# --- the primitive: two samples of per-seed scores -------------------------
vg_scores = list(48.4 + rng.normal(0, 0.8, size=7))
w_scores = list(42.2 + rng.normal(0, 0.9, size=7))
t, dof, p = welch_t_test(vg_scores, w_scores)
print(f"welch: t={t:.3f} dof={dof:.2f} p={p:.2e}")
print(f"CDF sanity: cdf(0)=0.5 exactly -> {student_t_cdf(0.0, dof)}")

# --- the table: every method against the best, per condition ---------------
groups = []
for method, mean in (("w", 42.2), ("cat", 42.3), ("sg", 41.8), ("vg", 48.4)):
    groups.append(
        SeedGroupResult(
            "toy-nli", "similarity", method, list(mean + rng.normal(0, 0.9, size=7))
        )
    )
rows = significance_table(groups, alpha=0.05)
print(f"\n{'method':6s} {'mean':>7s} {'best':>5s} {'p':>10s} {'sig':>4s}")
for r in sorted(rows, key=lambda r: -r.mean):
    p_str = "" if r.p is None else f"{r.p:.2e}"
    sig = "" if r.significant is None else ("yes" if r.significant else "no")
    print(f"{r.method:6s} {r.mean:7.2f} {'*' if r.is_best else '':>5s} {p_str:>10s} {sig:>4s}")

# --- cross-task rank correlations ------------------------------------------
word_tasks = {"sim-a": list(rng.normal(50, 5, size=7)), "sim-b": list(rng.normal(30, 5, size=7))}
sent_tasks = {"probe-x": list(rng.normal(80, 2, size=7))}
wt, st, matrix = performance_correlation_matrix(word_tasks, sent_tasks)
print("\nSpearman between word-task and sentence-task results (per seed):")
for i, name in enumerate(wt):
    print(f"  {name} vs {st[0]}: {matrix[i, 0]:+.2f}")
