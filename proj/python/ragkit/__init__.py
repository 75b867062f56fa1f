# Copyright 2026 The ragkit Authors
# SPDX-License-Identifier: Apache-2.0
"""Python access to the ragkit retrieval-augmented QA core."""

from ragkit._ragkit import (
    AuthError,
    ConfigError,
    DimensionMismatch,
    EmbeddingVector,
    Embedder,
    EmptyField,
    EmptyPage,
    EmptyTextError,
    FormatError,
    HashingEmbedder,
    IoError,
    MemoryReservoir,
    RagError,
    answer_recall,
    arrange,
    bm25_scores,
    cosine,
    distill,
    exact_match,
    hit,
    html_to_text,
    normalize,
    parse_rewrite_output,
    prompt_fingerprint,
    run_cli,
    snippet_precision,
    split_sentences,
    token_f1,
)

__all__ = [name for name in dir() if not name.startswith("_")]
