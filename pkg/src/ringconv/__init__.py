"""Convolutional codes over Z/p^r with lifting decoders."""

from .block import (
    BlockCode,
    FieldDecoder,
    GVDecoder,
    TLNDecoder,
    dmin_free_code,
    gv_decode,
    tln_decode,
    xi_check,
)
from .decoder import ConvolutionalDecoder, DecoderConfig, analyze, decode_stream, decode_window, lambda_bound
from .exceptions import (
    ConditionViolated,
    DecodeFailure,
    HypothesisViolated,
    Inconsistent,
    NotAUnit,
    NotDivisible,
    RingConvError,
    TooLarge,
    Unreachable,
    WindowExhausted,
    WindowRetry,
)
from .poly import PolyEncoder, poly_encode
from .ring import RingParams, padic_expand, recompose
from .system import IsoSystem, SystemEncoder

__version__ = "0.1.0"
