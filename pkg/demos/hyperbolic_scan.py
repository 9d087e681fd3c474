"""Positivity scan on a rank-2 hyperbolic group, Cartan matrix [[2,-3],[-3,2]].

Every structure constant up to length 5 is expanded in the x-variables and
its sign pattern checked. Pass a length on the command line to go further
(6 takes under a minute).
"""

import sys

from kmk import ScanConfig, positivity_scan

L = int(sys.argv[1]) if len(sys.argv) > 1 else 5
report = positivity_scan(ScanConfig("hyperbolic:2,-3,-3,2", L, ()))
summary = report.summary()
print(f"{summary['entries']} constants, {summary['failures']} failures, "
      f"{report.stats['seconds']:.1f}s")
for entry in report.entries[-3:]:
    terms = entry.xp.terms
    top = max(sum(j) for j in terms)
    print(f"  d^{entry.w}_{{{entry.u},{entry.v}}}: {len(terms)} x-monomials, top degree {top}, "
          f"verdict {'pass' if entry.verdict.passed else 'FAIL'}")
