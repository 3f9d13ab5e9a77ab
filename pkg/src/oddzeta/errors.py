"""Exception hierarchy.

Every error carries a short machine-readable ``code`` used by the CLI.
"""


class OddZetaError(ValueError):
    code = "error"


class ZeroArgument(OddZetaError):
    code = "zero_argument"


class NotAgmon(OddZetaError):
    code = "not_agmon"


class NotPrincipal(NotAgmon):
    code = "not_principal"


class IndexOutOfSet(OddZetaError):
    code = "index_out_of_set"


class IndexSetMismatch(OddZetaError):
    code = "index_set_mismatch"


class InfiniteBothSides(OddZetaError):
    code = "infinite_both_sides"


class BoundaryEigenvalue(OddZetaError):
    code = "boundary_eigenvalue"


class InfiniteOnAxis(OddZetaError):
    code = "infinite_on_axis"


class NotConvergent(OddZetaError):
    code = "not_convergent"


class PoleHit(OddZetaError):
    code = "pole_hit"


class PoleAtOne(PoleHit):
    code = "pole_at_one"


class PoleAtZero(PoleHit):
    code = "pole_at_zero"


class ExpansionDepthInsufficient(OddZetaError):
    code = "expansion_depth_insufficient"


class FitUnstable(OddZetaError):
    code = "fit_unstable"


class DepthInsufficient(OddZetaError):
    code = "depth_insufficient"


class DegreeMismatch(OddZetaError):
    code = "degree_mismatch"


class NotElliptic(OddZetaError):
    code = "not_elliptic"


class NotScalarSupported(OddZetaError):
    code = "not_scalar_supported"


class OddOrderRequired(OddZetaError):
    code = "odd_order_required"


class NotSymmetric(OddZetaError):
    code = "not_symmetric"


class HypothesisViolated(OddZetaError):
    code = "hypothesis_violated"


class SchemaError(OddZetaError):
    code = "schema_error"


class NotRepresentable(OddZetaError):
    code = "not_representable"


class NotClassical(OddZetaError):
    code = "not_classical"
