"""Out-of-equilibrium quench: stalling plateaus and aging.

Start from a renewal law (a zero at the origin, i.i.d. gaps) at small q and
watch the origin.  On the time ladder t_n = (1/q)^n the vacancy probability
is flat inside each stalling window [t_n^+, t_{n+1}^-] and drops only in
the short active windows around the t_n: a staircase with plateau heights
(1/(2^n + 1))^(c0) for the never-flipped curve.  Two-time correlations keep
a memory of the quench: the covariance of the origin's occupation between
stalling periods m < n stays of order one, the hallmark of aging.
"""

from eastmodel import ModelParams, RenewalLaw, aging_experiment, plateau_experiment

params = ModelParams(q=0.05)
mu = RenewalLaw.geometric(0.5)

rep = plateau_experiment(mu, params, replicas=4000, seed=0)
print("plateau staircase (never-flipped probability at the origin):")
print("      t        period        vacancy   never_flipped")
for row in rep.rows[:: max(1, len(rep.rows) // 14)]:
    print(
        f"{row['t']:11.1f}   {row['period']:<12s} {row['vacancy']:.4f}    "
        f"{row['never_flipped']:.4f}"
    )
for name, lv in rep.meta["plateaus"].items():
    print(
        f"{name}: level {lv['never_flipped']:.4f} +- "
        f"{lv['never_flipped_stderr']:.4f}  (limit target {lv['target']:.4f})"
    )

print("\ntwo-time covariance across stalling periods (aging):")
aging = aging_experiment(mu, params, pairs=((1, 2), (1, 3)), replicas=2500, seed=0)
for row in aging.rows:
    print(
        f"cov(sigma_s(x), sigma_t(x)) at s = t_{row['m']}, t = t_{row['n']}: "
        f"{row['covariance']:.4f} +- {row['stderr']:.4f} "
        f"(limit {row['target']:.4f})"
    )
print("verdicts:", ", ".join(f"{v.name}: {'ok' if v.passed else 'FAIL'}" for v in aging.verdicts))
