"""The two-level annealing caricature: gaps shrink like 2^(-N/2)."""

from qubolattice.cartoon import report_rows, spectral_gap

print("== minimum gaps and Landau-Zener times ==")
print(f"{'N':>3} {'eps':>12} {'gap':>12} {'s*':>6} {'tau lin':>10} {'tau opt':>10}")
for row in report_rows(range(2, 13, 2)):
    print(
        f"{row['N']:>3} {row['eps']:>12.3e} {row['gap']:>12.6f} "
        f"{row['s_star']:>6.3f} {row['tau_linear']:>10.0f} {row['tau_optimal']:>10.1f}"
    )

print("\n== the gap along the schedule at N=6 ==")
for s in (0.0, 0.25, 0.45, 0.5, 0.55, 0.75, 1.0):
    bar = "#" * max(1, int(40 * spectral_gap(6, s)))
    print(f"  s={s:4.2f}  gap={spectral_gap(6, s):8.5f}  {bar}")
