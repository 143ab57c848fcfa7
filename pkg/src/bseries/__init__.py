"""Certified evaluation and verification of binomial-kernel series identities.

The package is layered bottom-up:

* :mod:`bseries.precision` — ball arithmetic (midpoint/radius) over mpmath.
* :mod:`bseries.exactnum` — exact rationals, quadratic surds, polynomials.
* :mod:`bseries.kernels` — binomial-product kernel families and term ratios.
* :mod:`bseries.seriesmodel` — series descriptions, weights, harmonic atoms.
* :mod:`bseries.constants` — pi, log, zeta(3), Dirichlet L-values as balls.
* :mod:`bseries.closedform` — exact closed-form right-hand sides.
* :mod:`bseries.evaluator` — certified/heuristic summation and verification.
* :mod:`bseries.telescope` — telescoping-certificate checking.
* :mod:`bseries.duality` — Galois conjugation of series and dual classification.
* :mod:`bseries.relation` — PSLQ integer-relation detection and RHS discovery.
* :mod:`bseries.catalog` — the record file format and the bundled catalog.
* :mod:`bseries.cli` — the ``bseries`` command line tool.
"""

__version__ = "0.1.0"
