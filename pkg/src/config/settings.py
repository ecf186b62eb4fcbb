"""
Configuration settings for the incompressible membrane simulator
"""

import os

from dotenv import load_dotenv

load_dotenv()


class Settings:
    """Application settings"""

    # Application settings
    APP_NAME: str = "Incompressible Membrane Simulator"
    APP_VERSION: str = "1.0.0"
    APP_DESCRIPTION: str = "Helmholtz-Hodge projection and geodesic flow of volume-preserving embeddings"

    # Runtime settings
    THREADS: int = int(os.getenv("MEMBRANE_THREADS", "1"))
    LOG_LEVEL: str = os.getenv("MEMBRANE_LOG_LEVEL", "WARNING")

    # Geometry tolerances
    TOL_GEOM: float = float(os.getenv("MEMBRANE_TOL_GEOM", "1e-8"))
    EPS_GEOM: float = float(os.getenv("MEMBRANE_EPS_GEOM", "1e-12"))
    EPS_MEAN_CURVATURE: float = float(os.getenv("MEMBRANE_EPS_MEAN_CURVATURE", "1e-8"))

    # Solver settings
    TOL_SOLVE: float = float(os.getenv("MEMBRANE_TOL_SOLVE", "1e-12"))
    DIRECT_SOLVER_MAX_VERTICES: int = int(os.getenv("MEMBRANE_DIRECT_SOLVER_MAX_VERTICES", "100000"))

    # Dynamics settings
    TOL_DYN: float = float(os.getenv("MEMBRANE_TOL_DYN", "1e-9"))
    VOL_TOL: float = float(os.getenv("MEMBRANE_VOL_TOL", "1e-8"))
    SHAKE_TOL: float = float(os.getenv("MEMBRANE_SHAKE_TOL", "1e-12"))
    NEWTON_MAX_ITER: int = int(os.getenv("MEMBRANE_NEWTON_MAX_ITER", "10"))

    # Finite differences
    FD_STEP: float = float(os.getenv("MEMBRANE_FD_STEP", "1e-6"))
    FD_HESSIAN_STEP: float = float(os.getenv("MEMBRANE_FD_HESSIAN_STEP", "1e-4"))

    # Oracle settings
    DENSE_ORACLE_MAX_VERTICES: int = int(os.getenv("MEMBRANE_DENSE_ORACLE_MAX_VERTICES", "512"))


# Global settings instance
settings = Settings()
