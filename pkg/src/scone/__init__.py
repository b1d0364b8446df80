"""Constraint-aware quaternary arithmetic coding of bitstreams into DNA strands."""

from .coder import (
    DnaStrand,
    IllegalStrand,
    Payload,
    PayloadMismatch,
    ZeroCapacity,
    bpn,
    bpn_core,
    generate_strand,
    pack_strand,
    unpack_strand,
)
from .container import StrandRecord, read_fasta, read_record, write_fasta, write_record
from .fsm import Base, BaseMask, ConfigError, ConstraintConfig, FsmState, new_state, replay
from .model import (
    LatentAdapterConfig,
    StaticPmfProvider,
    UniformProvider,
    base4_map,
    base4_unmap,
    gaussian_symbol_pmf,
    mask_and_renormalize,
    uniform_pmf,
)
from .latent import LatentAdapter, payload_to_symbols, symbols_to_payload
from .metrics import corpus_eval, strand_stats

__version__ = "0.1.0"
