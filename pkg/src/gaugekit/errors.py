"""Exception types shared across gaugekit."""


class GaugekitError(Exception):
    """Base class; ``code`` is the name reported by the command line."""

    code = "error"


class DimensionMismatch(GaugekitError, ValueError):
    code = "dimension_mismatch"


class Assumption5Violated(GaugekitError):
    """A gauge that may vanish away from the origin was given where the
    unit ball must be bounded."""

    code = "assumption5_violated"


class AssumptionViolated(GaugekitError):
    code = "assumption_violated"


class NegativeMultiplier(GaugekitError, ValueError):
    code = "negative_multiplier"


class NotInfeasible(GaugekitError):
    code = "not_infeasible"


class WitnessUnavailable(GaugekitError):
    code = "witness_unavailable"


class SphereConditionViolated(GaugekitError):
    code = "sphere_condition_violated"


class KKTResidualTooLarge(GaugekitError):
    code = "kkt_residual_too_large"


class AnchorOutOfDomain(GaugekitError, ValueError):
    code = "anchor_out_of_domain"


class NegativeFunctionValueDetected(GaugekitError):
    code = "negative_function_value"


class DimensionTooLarge(GaugekitError):
    code = "dimension_too_large"


class PenaltyTooSmall(GaugekitError):
    code = "penalty_too_small"


class Infeasible(GaugekitError):
    code = "infeasible"


class Unbounded(GaugekitError):
    code = "unbounded"


class SchemaError(GaugekitError, ValueError):
    code = "schema_error"
