"""Bit measures of graph development: description length, compression,
normalized compression distance, and PageRank over the dataflow DAG.

Kolmogorov complexity itself is not computable, so compressed size
under a pinned general-purpose compressor stands in for it, and NCD
built on that compressor stands in for similarity. The compressor
contract is zlib at level 9 (identity string "zlib-9"); every report
records it so numbers are never compared across contracts.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Optional

from .dsl import canonical_serialize
from .graph import GraphSpec, ValidatedGraph, node_count

COMPRESSOR_ID = "zlib-9"


def compressed_bits(data: bytes) -> int:
    """8 x compressed length of `data` under the pinned compressor."""
    return 8 * len(zlib.compress(data, 9))


def description_bits(spec: GraphSpec, include_params: bool = False) -> int:
    """Bits in the canonical text, plus 64 per parameter scalar if asked."""
    bits = 8 * len(canonical_serialize(spec))
    if include_params:
        for p in spec.params:
            scalars = 1
            for d in p.shape.dims:
                scalars *= d
            bits += 64 * scalars
    return bits


def ncd(a: bytes, b: bytes) -> float:
    """Normalized compression distance between two byte sequences.

    (C(ab) - min(C(a), C(b))) / max(C(a), C(b)); typically lands in
    [0, 1.1] for real compressors.
    """
    if not a or not b:
        raise ValueError("ncd needs non-empty inputs")
    ca = compressed_bits(a)
    cb = compressed_bits(b)
    cab = compressed_bits(a + b)
    return (cab - min(ca, cb)) / max(ca, cb)


def pagerank(
    graph: ValidatedGraph,
    damping: float = 0.85,
    tolerance: float = 1e-10,
    max_iter: int = 1000,
) -> dict:
    """PageRank scores over every declared name of the dataflow graph.

    Edges run operand -> consumer (parallel edges collapsed); vertices
    with no outgoing edge spread their mass uniformly. Power iteration
    stops when the L1 change drops below `tolerance`. Scores sum to 1.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError("damping must lie strictly between 0 and 1")
    spec = graph.spec
    names = sorted(spec.declared_names())
    n = len(names)
    out_edges: dict = {name: set() for name in names}
    for node in spec.nodes:
        for operand in node.operands:
            out_edges[operand].add(node.name)

    score = {name: 1.0 / n for name in names}
    for _ in range(max_iter):
        dangling = sum(score[v] for v in names if not out_edges[v])
        base = (1.0 - damping) / n + damping * dangling / n
        new = {name: base for name in names}
        for v in names:
            targets = out_edges[v]
            if targets:
                share = damping * score[v] / len(targets)
                for t in targets:
                    new[t] += share
        change = sum(abs(new[v] - score[v]) for v in names)
        score = new
        if change < tolerance:
            break
    return score


@dataclass(frozen=True)
class ComplexityReport:
    description_bits: int
    compressed_bits: int
    node_count: int
    ncd_to_reference: Optional[float]
    pagerank: dict  # name -> score, sums to 1
    compressor: str

    def to_dict(self) -> dict:
        return {
            "description_bits": self.description_bits,
            "compressed_bits": self.compressed_bits,
            "node_count": self.node_count,
            "ncd_to_reference": self.ncd_to_reference,
            "pagerank": dict(sorted(self.pagerank.items())),
            "compressor": self.compressor,
        }


def build_report(graph: ValidatedGraph, reference: Optional[GraphSpec] = None) -> ComplexityReport:
    """All complexity measures for one validated graph in one record."""
    canonical = canonical_serialize(graph.spec)
    return ComplexityReport(
        description_bits=description_bits(graph.spec),
        compressed_bits=compressed_bits(canonical),
        node_count=node_count(graph.spec),
        ncd_to_reference=(
            ncd(canonical, canonical_serialize(reference)) if reference is not None else None
        ),
        pagerank=pagerank(graph),
        compressor=COMPRESSOR_ID,
    )
