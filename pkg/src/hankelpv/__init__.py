"""Arbitrary-precision engine for Hankel determinants of the singularly
perturbed Jacobi weight (1-x^2)^alpha * exp(-t/x^2) on [-1, 1].

Subpackages are organized bottom-up: `precision` and `special` supply the
numeric substrate, `weights`/`recurrence` build moment and orthogonal
polynomial tables, `ladder` derives the auxiliary Painlevé-type quantities,
`identities` runs the residual verification suite, `bridge` maps everything
onto the associated deformed-Jacobi system on [0, 1], and `asymptotics`
handles the double-scaling limits. `cli` is the command-line front end.
"""

from .precision import PrecisionConfig, working_precision

__version__ = "0.1.0"

__all__ = ["PrecisionConfig", "working_precision", "__version__"]
