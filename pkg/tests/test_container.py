import random
import struct
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scone.coder import Payload, generate_strand, unpack_strand
from scone.container import (
    HEADER_SIZE,
    BadMagic,
    FastaError,
    InvalidBase,
    RecordError,
    StrandRecord,
    TruncatedRecord,
    UnsupportedVersion,
    fasta_strands,
    read_fasta,
    read_record,
    write_fasta,
    write_record,
)
from scone.fsm import ConstraintConfig
from scone.model import StaticPmfProvider, pmf_from_probs


def sample_record(n_bytes=25, seed=0, **kw):
    p = Payload(random.Random(seed).randbytes(n_bytes))
    cfg = ConstraintConfig(**kw)
    return StrandRecord(cfg, p.bit_length, generate_strand(p, config=cfg).bases), p


def test_golden_record_bytes():
    rec = StrandRecord(ConstraintConfig(), 8, "ATGC")
    # magic, version, flags GC|HP, window, gamma lo/hi, hp_max, guard,
    # provider id, params length, bit length, strand length, bases
    expected = (
        b"SCN1" + bytes([1, 3, 20]) + struct.pack(">HH", 450, 550) + bytes([3, 32, 0])
        + struct.pack(">H", 0) + struct.pack(">Q", 8) + struct.pack(">I", 4) + b"ATGC"
    )
    assert write_record(rec) == expected
    assert HEADER_SIZE == 28
    assert read_record(expected) == rec


def test_roundtrip_default_and_flags():
    for kw in ({}, {"gc_enabled": False}, {"hp_enabled": False}, {"window": 30, "guard_bits": 7}):
        rec, p = sample_record(**kw)
        back = read_record(write_record(rec))
        assert back == rec
        assert unpack_strand(back.strand, back.payload_bit_length, back.provider(), back.config) == p


def test_static_pmf_params_roundtrip():
    prov = StaticPmfProvider(pmf_from_probs([0.4, 0.1, 0.1, 0.4]))
    rec = StrandRecord(ConstraintConfig(), 0, "", "static_pmf", prov.params())
    back = read_record(write_record(rec))
    assert back.provider().freq == prov.freq


def test_bad_magic():
    raw = bytearray(write_record(sample_record()[0]))
    raw[:4] = b"SCNX"
    with pytest.raises(BadMagic):
        read_record(bytes(raw))


def test_unsupported_version():
    raw = bytearray(write_record(sample_record()[0]))
    raw[4] = 2
    with pytest.raises(UnsupportedVersion):
        read_record(bytes(raw))


def test_invalid_base_reports_offset():
    raw = bytearray(write_record(sample_record()[0]))
    raw[HEADER_SIZE + 5] = ord("N")
    with pytest.raises(InvalidBase) as exc:
        read_record(bytes(raw))
    assert exc.value.offset == HEADER_SIZE + 5


def test_truncation_anywhere_is_detected():
    raw = write_record(sample_record(4)[0])
    for cut in range(len(raw)):
        with pytest.raises(RecordError):
            read_record(raw[:cut])
    with pytest.raises(TruncatedRecord):
        read_record(raw[:-1])


def test_trailing_bytes_rejected():
    raw = write_record(sample_record(4)[0])
    with pytest.raises(RecordError):
        read_record(raw + b"A")


def test_eos_and_unknown_flags_rejected():
    raw = bytearray(write_record(sample_record(4)[0]))
    for flag in (0x04, 0x80):
        bad = bytearray(raw)
        bad[5] |= flag
        with pytest.raises(RecordError):
            read_record(bytes(bad))


def test_bad_constraint_fields_rejected():
    raw = bytearray(write_record(sample_record(4)[0]))
    raw[6] = 0  # window 0
    with pytest.raises(RecordError):
        read_record(bytes(raw))


@settings(max_examples=400, deadline=None)
@given(st.binary(max_size=80))
def test_fuzz_raw_bytes(raw):
    try:
        read_record(b"SCN1" + raw)
    except RecordError:
        pass


@settings(max_examples=400, deadline=None)
@given(st.integers(0, 10**6), st.lists(st.tuples(st.integers(0, 200), st.integers(0, 255)), max_size=4))
def test_fuzz_mutated_records(seed, edits):
    raw = bytearray(write_record(sample_record(6, seed)[0]))
    for pos, val in edits:
        if pos < len(raw):
            raw[pos] = val
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            read_record(bytes(raw))
        except RecordError:
            pass


def test_fasta_single():
    assert write_fasta(["ATGC"]) == ">s0\nATGC\n"
    assert read_fasta(">s0\nATGC\n") == [("s0", "ATGC")]


def test_fasta_wraps_at_80():
    seq = "ATGC" * 50
    text = write_fasta([seq, "GG"], ids=["a", "b"])
    lines = text.splitlines()
    assert lines[:4] == [">a", seq[:80], seq[80:160], seq[160:]]
    assert read_fasta(text) == [("a", seq), ("b", "GG")]


def test_fasta_lenient_reading():
    text = ">x desc here\r\natgc\n\nAT\n>y\n\n"
    assert read_fasta(text) == [("x", "ATGCAT"), ("y", "")]
    assert fasta_strands(text) == ["ATGCAT", ""]


@pytest.mark.parametrize(
    "text",
    [">a\nATGN\n", ">a\nAT\n>a\nGC\n", "ATGC\n", ">\nAT\n"],
)
def test_fasta_errors(text):
    with pytest.raises(FastaError):
        read_fasta(text)


def test_fasta_writer_rejects_bad_ids():
    with pytest.raises(FastaError):
        write_fasta(["A", "T"], ids=["x", "x"])
    with pytest.raises(FastaError):
        write_fasta(["A"], ids=["has space"])


@given(st.lists(st.text(alphabet="ATGC", max_size=300), max_size=5), st.integers(1, 100))
def test_fasta_roundtrip(seqs, width):
    assert fasta_strands(write_fasta(seqs, width=width)) == seqs
