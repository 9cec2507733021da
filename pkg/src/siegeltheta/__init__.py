"""Exact toolkit for mod-p Siegel modular forms of degree 2."""

from .core import (
    FpElem,
    IndexOutOfRange,
    ParameterMismatch,
    ThetaError,
    TMatrix,
    ValidationError,
    Weight,
    delta_p,
    det_t,
    m_shift,
    theta_target_weight,
    weight_lex_le,
)

__version__ = "0.1.0"
