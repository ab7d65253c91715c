"""Spelling correction with a nested RNN trained on phonetic pseudo data."""

from spellnet._core import (
    Corrector,
    extract_edits,
    matmul,
    run,
    score,
    softmax_rows,
)

__all__ = [
    "Corrector",
    "extract_edits",
    "matmul",
    "run",
    "score",
    "softmax_rows",
]
