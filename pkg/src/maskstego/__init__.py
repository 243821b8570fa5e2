"""maskstego: hide bitstreams in token sequences via masked-LM prediction.

A cover text is tokenized, a keyed subset of word positions is masked, and
each masked position is refilled autoregressively with a token whose
prefix-free code matches the next bits of the (length-framed) message. The
receiver, holding the same key, threshold, and model, replays the walk and
reads the bits back off the tokens it observes.
"""
from .coding import (
    CandidateSet,
    CodeBook,
    build_block_codebook,
    build_consistency_codebook,
    decode_step,
    encode_step,
    select_candidates,
)
from .errors import (
    CapacityError,
    ConfigError,
    DegenerateSetError,
    DesyncError,
    DeterminismError,
    ProtocolError,
    StegoError,
    TransportError,
    TruncatedStreamError,
    UndefinedPayloadError,
)
from .lm import (
    MaskedLM,
    PredictionDistribution,
    ReferenceLM,
    RemoteLM,
    reference_predict,
    remote_predict,
)
from .masking import MaskPlan, is_maskable, plan_masks, temporary_text
from .metrics import PayloadStats, payload_bpw, pseudo_perplexity
from .pipeline import EmbedReport, PositionRecord, embed, embed_many, extract, extract_many
from .textcore import (
    MASK,
    MaskToken,
    MessagePayload,
    SecretKey,
    StegoConfig,
    Token,
    TokenSequence,
    apply_masks,
    bits_from_bytes,
    bits_to_bytes,
    decode_payload_text,
    encode_payload_text,
    frame_message,
    unframe_message,
)

__version__ = "0.1.0"

__all__ = [
    "MASK",
    "CandidateSet",
    "CapacityError",
    "CodeBook",
    "ConfigError",
    "DegenerateSetError",
    "DesyncError",
    "DeterminismError",
    "EmbedReport",
    "MaskPlan",
    "MaskToken",
    "MaskedLM",
    "MessagePayload",
    "PayloadStats",
    "PositionRecord",
    "PredictionDistribution",
    "ProtocolError",
    "ReferenceLM",
    "RemoteLM",
    "SecretKey",
    "StegoConfig",
    "StegoError",
    "Token",
    "TokenSequence",
    "TransportError",
    "TruncatedStreamError",
    "UndefinedPayloadError",
    "apply_masks",
    "bits_from_bytes",
    "bits_to_bytes",
    "build_block_codebook",
    "build_consistency_codebook",
    "decode_payload_text",
    "decode_step",
    "embed",
    "embed_many",
    "encode_payload_text",
    "encode_step",
    "extract",
    "extract_many",
    "frame_message",
    "is_maskable",
    "payload_bpw",
    "plan_masks",
    "pseudo_perplexity",
    "reference_predict",
    "remote_predict",
    "select_candidates",
    "temporary_text",
    "unframe_message",
]
