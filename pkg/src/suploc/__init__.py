"""Support localisation for measures from their moments via orthogonal polynomials."""

from .errors import InputError, NumericalError, SuplocError
from .measure import AtomPart, IntervalPart, MeasureSpec, QuadratureOracle, Regime, moments
from .metrics import SupportSet, atom_success, hausdorff, interval_iou, rate_fit
from .momentio import MomentData, MomentOracle, flatness, psd_check
from .orthopoly import Recurrence, jacobi, stieltjes
from .recover import SupportEstimate, classify, suploc, suploc_adaptive
from .spectra import RootList, eigenvalues, tridiagonal_eigenvalues

__all__ = [
    "AtomPart",
    "InputError",
    "IntervalPart",
    "MeasureSpec",
    "MomentData",
    "MomentOracle",
    "NumericalError",
    "QuadratureOracle",
    "Recurrence",
    "Regime",
    "RootList",
    "SupportEstimate",
    "SupportSet",
    "SuplocError",
    "atom_success",
    "classify",
    "eigenvalues",
    "flatness",
    "hausdorff",
    "interval_iou",
    "jacobi",
    "moments",
    "psd_check",
    "rate_fit",
    "stieltjes",
    "suploc",
    "suploc_adaptive",
    "tridiagonal_eigenvalues",
]
