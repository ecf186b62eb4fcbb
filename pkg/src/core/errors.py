"""
Error hierarchy for the membrane simulator
"""


class MembraneError(RuntimeError):
    """Base class for all runtime failures of the simulator"""


class DegenerateGeometry(MembraneError):
    """Zero-length edge, zero-area triangle or cusp"""


class NonManifold(MembraneError):
    """Surface connectivity is not a closed, consistently oriented 2-manifold"""


class MeanCurvatureVanishing(MembraneError):
    """The mean-curvature vector vanishes where the projection needs it"""


class SolverBreakdown(MembraneError):
    """Iterative solver stagnated or direct factorization failed"""


class RenormalizationDiverged(MembraneError):
    """Newton restoration of the density did not converge"""


class OracleCheckFailed(MembraneError):
    """A brute-force validator disagreed with its own algebraic checks"""


class ConfigError(ValueError):
    """Invalid scenario configuration or input file"""
