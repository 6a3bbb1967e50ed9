"""Landau model / chiral oscillator duality, its Z2 anomaly, and an
interferometric probe of the anomalous pi phase."""
from .classical import Model, ModelParams, PhaseState, Trajectory
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["Model", "ModelParams", "PhaseState", "Trajectory", "BACKEND", "__version__"]
