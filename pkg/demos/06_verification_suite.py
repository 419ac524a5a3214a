"""Run the seeded verification suite and show how tolerance affects it."""

from opgamma.core import ToleranceContext
from opgamma.theorems import run_all

report = run_all(seed=0)
for r in report.results:
    print(f"{r.id:>4} {'pass' if r.passed else 'FAIL'}  worst residual {r.worst_residual:.1e}  {r.description}")
print(f"{report.pass_count}/{len(report.results)} pass in {report.wall_time:.1f} s")

# Same seed, same report, whether or not checks run in parallel.
print("deterministic:", run_all(seed=0, workers=4) == report)

# Asking for 1e-15 is below what floating point SVDs deliver.
strict = run_all(ToleranceContext(check_tol=1e-15), trials=50)
first = next(r for r in strict.results if not r.passed)
print(f"check_tol=1e-15: {strict.fail_count} checks fail, e.g. {first.id}: {first.message}")
