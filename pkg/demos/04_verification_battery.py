"""Run the full exact verification battery and print one line per suite.

Each suite draws random reversible chains and checks one inequality or
identity with exact matrix arithmetic; a violation would print a JSON
reproducer. This is the same machinery behind ``lazymcmc verify``.
"""

import sys
import time

from lazymcmc import verify

started = time.time()
results = verify.run_all(seed=0)
for check in results:
    print(check.summary())
print(f"\n{sum(c.comparisons for c in results)} comparisons in {time.time() - started:.1f}s")

if any(not check.passed for check in results):
    sys.exit(1)
