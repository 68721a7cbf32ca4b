"""Randomized polar subcodes: construction, decoding, weight analysis, simulation."""

from .construction import (
    CodeSpec,
    ConstructionRng,
    SpecFormatError,
    construct,
    default_params,
    deserialize,
    encode_message,
    serialize,
)
from .decoders import DecodeResult, sc_decode, scl_decode
from .reliability import ChannelModel, ReliabilityProfile, evolve_reliabilities, order_by_reliability
from .simulate import SimConfig, SimRecord, run_point, run_sweep
from .weights import (
    LowWeightSearchConfig,
    WeightRecord,
    exact_weight_enumerator,
    expected_subcode_spectrum,
    low_weight_search,
    polar_error_coefficient,
)

__all__ = [
    "ChannelModel",
    "CodeSpec",
    "ConstructionRng",
    "DecodeResult",
    "LowWeightSearchConfig",
    "ReliabilityProfile",
    "SimConfig",
    "SimRecord",
    "SpecFormatError",
    "WeightRecord",
    "construct",
    "default_params",
    "deserialize",
    "encode_message",
    "evolve_reliabilities",
    "exact_weight_enumerator",
    "expected_subcode_spectrum",
    "low_weight_search",
    "order_by_reliability",
    "polar_error_coefficient",
    "run_point",
    "run_sweep",
    "sc_decode",
    "scl_decode",
    "serialize",
]
