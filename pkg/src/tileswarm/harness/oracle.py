"""Centralized greedy reference for the decentralized clustering rule.

Processes ideas in entry order with global, instantaneous knowledge and
never revisits a decision: the zero-latency, lossless, no-recalculation
idealization the simulator is measured against.
"""

from __future__ import annotations

from ..core import AggregateId, TileId
from ..similarity import EmbeddingProvider, pair_score, select_best


def oracle_assign(
    ideas: list[tuple[TileId, str]],
    threshold: float,
    marker_count: int,
    provider: EmbeddingProvider,
) -> dict[TileId, AggregateId]:
    """Greedy sequential assignment with global knowledge.

    Each idea joins the aggregate of the most similar already-entered idea
    when that similarity strictly clears the threshold (ties to the lowest
    tile id); otherwise it opens the lowest free marker; otherwise 0.
    Re-entering a tile replaces its previous idea before scoring.
    """
    assignment: dict[TileId, AggregateId] = {}
    current: dict[TileId, str] = {}
    for tid, text in ideas:
        scored = (
            (other, assignment[other], pair_score(provider, text, other_text))
            for other, other_text in current.items()
            if other != tid
        )
        best = select_best(scored, threshold)
        if best is not None and best.aggregate != 0:
            assignment[tid] = best.aggregate
        else:
            occupied = {
                agg for other, agg in assignment.items() if other != tid and agg != 0
            }
            assignment[tid] = next(
                (m for m in range(1, marker_count + 1) if m not in occupied), 0
            )
        current[tid] = text
    return assignment
