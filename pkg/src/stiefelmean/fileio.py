"""Text file format for sample sets and single Stiefel points.

Layout (UTF-8):

    p n N sigma seed [C]
    <block>
    <blank line>
    <block>
    ...

The header carries the dimensions, the number of stored samples N, the
spread sigma and the generation seed. When the literal token ``C`` is
appended, the first block is the center of the distribution and N further
blocks follow; otherwise exactly N blocks follow. Each block is p lines of
n space-separated decimal values written with 17 significant digits, which
round-trips float64 exactly.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np

from .errors import FileFormatError
from .manifold import Dims, SampleSet, StiefelPoint


def _format_row(row: np.ndarray) -> str:
    return " ".join(f"{v:.16e}" for v in row)


def write_sample_set(path, sample_set: SampleSet, include_center: bool = True) -> None:
    """Write a sample set; the center block is included when known unless
    ``include_center`` is false."""
    with_center = include_center and sample_set.center is not None
    dims = sample_set.dims
    header = f"{dims.p} {dims.n} {len(sample_set)} {sample_set.sigma!r} {sample_set.seed}"
    if with_center:
        header += " C"
    blocks = []
    if with_center:
        blocks.append(sample_set.center.X)
    blocks.extend(s.X for s in sample_set.samples)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for b, block in enumerate(blocks):
            if b:
                fh.write("\n")
            for row in block:
                fh.write(_format_row(row) + "\n")


def read_matrix_blocks(path) -> Tuple[dict, List[np.ndarray]]:
    """Parse a sample-set file without enforcing manifold invariants.

    Returns the header as a dict (p, n, count, sigma, seed, has_center) and
    the raw matrix blocks (center first when present). Format problems raise
    ``FileFormatError`` with the offending line (and column for bad values).
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].strip():
        raise FileFormatError("missing header line", line=1)
    tokens = lines[0].split()
    if len(tokens) not in (5, 6):
        raise FileFormatError(
            f"header needs 'p n N sigma seed [C]', got {len(tokens)} tokens", line=1
        )
    try:
        p, n, count = int(tokens[0]), int(tokens[1]), int(tokens[2])
        sigma = float(tokens[3])
        seed = int(tokens[4])
    except ValueError as exc:
        raise FileFormatError(f"bad header value: {exc}", line=1) from exc
    has_center = False
    if len(tokens) == 6:
        if tokens[5] != "C":
            raise FileFormatError(f"unexpected header token '{tokens[5]}'", line=1)
        has_center = True
    if p < 1 or n < 1 or n > p:
        raise FileFormatError(f"invalid dimensions p={p} n={n}", line=1)
    if count < 1:
        raise FileFormatError(f"invalid sample count {count}", line=1)

    expected = count + (1 if has_center else 0)
    blocks: List[np.ndarray] = []
    i = 1
    total = len(lines)
    while len(blocks) < expected:
        while i < total and not lines[i].strip():
            i += 1
        if i >= total:
            raise FileFormatError(
                f"expected {expected} blocks, found {len(blocks)}", line=total
            )
        rows = []
        for r in range(p):
            if i >= total or not lines[i].strip():
                raise FileFormatError(
                    f"block {len(blocks)}: expected {p} rows, got {r}", line=i
                )
            parts = lines[i].split()
            if len(parts) != n:
                raise FileFormatError(
                    f"expected {n} values, got {len(parts)}", line=i + 1
                )
            row = []
            for c, tok in enumerate(parts):
                try:
                    val = float(tok)
                except ValueError:
                    raise FileFormatError(
                        f"could not parse '{tok}' as a number", line=i + 1, column=c + 1
                    ) from None
                if not np.isfinite(val):
                    raise FileFormatError(
                        f"non-finite value '{tok}'", line=i + 1, column=c + 1
                    )
                row.append(val)
            rows.append(row)
            i += 1
        if i < total and lines[i].strip():
            raise FileFormatError("expected a blank line between blocks", line=i + 1)
        blocks.append(np.array(rows, dtype=float))
    while i < total:
        if lines[i].strip():
            raise FileFormatError("trailing content after the last block", line=i + 1)
        i += 1
    header = {
        "p": p, "n": n, "count": count, "sigma": sigma, "seed": seed,
        "has_center": has_center,
    }
    return header, blocks


def read_sample_set(path, tol: Optional[float] = None) -> SampleSet:
    """Read and validate a sample set; every block must satisfy the Stiefel
    orthonormality invariant (``ValidationError`` otherwise)."""
    header, blocks = read_matrix_blocks(path)
    dims = Dims(header["p"], header["n"])
    kwargs = {} if tol is None else {"tol": tol}
    center = None
    if header["has_center"]:
        center = StiefelPoint(blocks[0], dims=dims, **kwargs)
        blocks = blocks[1:]
    samples = tuple(StiefelPoint(b, dims=dims, **kwargs) for b in blocks)
    return SampleSet(
        dims=dims, center=center, sigma=header["sigma"], seed=header["seed"],
        samples=samples,
    )


def write_point(path, point: StiefelPoint, sigma: float = 0.0, seed: int = 0) -> None:
    """Write a single point in the sample-set format (N = 1, no center block).
    ``sigma`` and ``seed`` are carried as provenance metadata."""
    ss = SampleSet(
        dims=point.dims, center=None, sigma=sigma, seed=seed, samples=(point,)
    )
    write_sample_set(path, ss, include_center=False)
