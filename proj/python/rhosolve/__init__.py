"""Transmission-eigenvalue distributions for 2D disordered waveguides."""

from ._core import (
    ConfigError,
    SolverError,
    __version__,
    calibrate_ell,
    composite_t_grid,
    dmpk_F,
    lattice_eigenvalues,
    lattice_ensemble,
    qb_F,
    run_config,
    transport_F,
    two_stream_F,
)

__all__ = [
    "ConfigError",
    "SolverError",
    "__version__",
    "calibrate_ell",
    "composite_t_grid",
    "dmpk_F",
    "lattice_eigenvalues",
    "lattice_ensemble",
    "qb_F",
    "run_config",
    "transport_F",
    "two_stream_F",
]
