"""Information-guided inference of parametric temporal logic formulas."""

from .logic import parse
from .infogain import InfoGainResult, info_gain
from .infer import InferConfig, infer, infer_causal
from .prob import Dtmc, Stationary, simulate
from .trajectory import Dataset, Trajectory

__all__ = [
    "Dataset", "Dtmc", "InferConfig", "InfoGainResult", "Stationary", "Trajectory",
    "info_gain", "infer", "infer_causal", "parse", "simulate",
]
