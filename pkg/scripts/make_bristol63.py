"""Generate the bundled bristol63 scenario fixture.

63 tiles, 5 markers, 315 scripted idea entries drawn from five
health-themed idea pools.  Regeneration is deterministic; run from the
repo root:

    python scripts/make_bristol63.py [--check]

--check only prints corpus statistics without rewriting the fixture.
"""

from __future__ import annotations

import argparse
import itertools
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tileswarm.arena import ArenaConfig, MarkerTable, Pose
from tileswarm.harness.scenario import Scenario, ScriptEvent, dump_scenario
from tileswarm.netsim import NetworkConfig
from tileswarm.similarity import TrigramProvider, pair_score

OUT = Path(__file__).resolve().parent.parent / "src/tileswarm/scenarios/bristol63.scenario"

RNG_SEED = 20240917
N_TILES = 63
N_IDEAS = 315
FOUNDING_SPACING = 14
DURATION = 3000
LAST_ENTRY = 2450

# Five idea themes, each anchored by a phrase present in every variant.
# The selection is frozen from a verified search: cross-theme cosine max
# 0.287, within-theme min 0.364 under the trigram provider; main() asserts
# those bounds before writing the fixture.
THEMES: dict[str, list[str]] = {
    "cycling": [
        "build protected bike lanes",
        "bike lanes with solid kerbs",
        "safer wider bike lanes",
        "paint bright bike lanes",
        "bike lanes linking suburbs",
        "bike lanes past the station",
        "bike lanes kids can pedal",
        "bollards guarding bike lanes",
        "bike lanes on commuter routes",
        "sweep glass off bike lanes",
        "bike lanes uphill both ways",
        "bike lanes over the bridge",
        "bike lanes free from taxis",
        "bike lanes painted crimson",
        "wind proof bike lanes",
        "bike lanes plus cycle parking",
        "bike lanes during roadworks",
    ],
    "trees": [
        "plant trees everywhere",
        "plant native young trees",
        "plant trees to give shade",
        "plant orchard trees",
        "volunteers plant trees yearly",
        "plant trees where tarmac cracked",
        "plant trees round playgrounds",
        "plant trees beside canals",
        "plant evergreen trees",
        "plant fig trees downtown",
    ],
    "food": [
        "cheap fresh veg markets",
        "weekly veg markets",
        "subsidised veg markets",
        "veg markets near housing",
        "sunday veg markets",
        "veg markets not takeaways",
        "veg markets at the quay",
        "low cost veg markets",
        "bring back veg markets",
        "veg markets every morning",
        "organic veg markets",
        "veg markets for tenants",
        "covered veg markets",
        "veg markets that accept vouchers",
    ],
    "swimming": [
        "reopen the outdoor swimming pool",
        "heated swimming pool sessions",
        "cheaper swimming pool entry",
        "new eastside swimming pool",
        "community run swimming pool",
        "pensioner swimming pool passes",
        "fix the lido swimming pool",
        "quiet hours swimming pool",
        "family swimming pool discounts",
        "keep the swimming pool affordable",
        "swimming pool with a sauna",
        "swimming pool membership bursaries",
        "fifty metre swimming pool",
        "swimming pool inflatable nights",
        "accessible swimming pool hoists",
        "swimming pool water polo club",
    ],
    "air": [
        "enforce the clean air zone",
        "expand our clean air zone",
        "hourly clean air zone monitors",
        "tougher clean air zone limits",
        "clean air zone exhaust checks",
        "publish clean air zone data",
        "clean air zone for delivery vans",
        "clean air zone against idling",
        "clean air zone fines reinvested",
        "permanent clean air zone",
        "clean air zone smog alerts",
        "clean air zone charging gantries",
        "nighttime clean air zone",
        "clean air zone citizen sensors",
    ],
}


def build_corpus(rng: random.Random) -> list[tuple[str, str]]:
    """315 (theme, text) entries; repeats are fine, visitors repeat ideas."""
    per_theme = N_IDEAS // len(THEMES)
    corpus: list[tuple[str, str]] = []
    for theme, pool in THEMES.items():
        texts = list(pool) + [rng.choice(pool) for _ in range(per_theme - len(pool))]
        corpus.extend((theme, t) for t in texts)
    rng.shuffle(corpus)
    return corpus


def corpus_stats() -> tuple[float, float]:
    """(max cross-theme, min within-theme) cosine over the base pools."""
    provider = TrigramProvider()
    worst_cross = 0.0
    min_within = 1.0
    pool = [(t, x) for t, xs in THEMES.items() for x in xs]
    for (ta, a), (tb, b) in itertools.combinations(pool, 2):
        score = pair_score(provider, a, b)
        if ta != tb:
            worst_cross = max(worst_cross, score)
        else:
            min_within = min(min_within, score)
    return worst_cross, min_within


def build_scenario() -> Scenario:
    rng = random.Random(RNG_SEED)
    corpus = build_corpus(rng)

    # Final idea per tile decides its final aggregate; balance the themes so
    # no aggregate outgrows the third parking ring.
    themes = list(THEMES)
    final_theme = [themes[i % len(themes)] for i in range(N_TILES)]
    rng.shuffle(final_theme)

    by_theme: dict[str, list[str]] = {t: [] for t in themes}
    for theme, text in corpus:
        by_theme[theme].append(text)

    # Founding phase: two spaced entries per theme so every aggregate exists
    # before traffic gets dense.
    founding: list[tuple[int, str]] = []  # (tile, text)
    tile_ids = list(range(1, N_TILES + 1))
    rng.shuffle(tile_ids)
    founding_tiles = tile_ids[: 2 * len(themes)]
    for i, theme in enumerate(themes * 2):
        founding.append((founding_tiles[i], by_theme[theme].pop(0)))

    # Remaining entries: each tile ends on its final theme; earlier entries
    # draw from whatever is left, in shuffled order.
    entries_per_tile: dict[int, list[str]] = {tid: [] for tid in tile_ids}
    counts = {tid: 5 for tid in tile_ids}
    for tid, _ in founding:
        counts[tid] -= 1
    # reserve each tile's final entry from its final theme pool
    finals: dict[int, str] = {}
    for tid in tile_ids:
        theme = final_theme[tid - 1]
        finals[tid] = by_theme[theme].pop(0)
        counts[tid] -= 1
    leftovers = [text for pool in by_theme.values() for text in pool]
    rng.shuffle(leftovers)
    for tid in tile_ids:
        for _ in range(counts[tid]):
            entries_per_tile[tid].append(leftovers.pop())
    assert not leftovers

    # Interleave non-final entries across tiles, then append finals so each
    # tile's last entry is its reserved one.
    middle: list[tuple[int, str]] = []
    pools = {tid: list(texts) for tid, texts in entries_per_tile.items()}
    active = [tid for tid in tile_ids if pools[tid]]
    while active:
        tid = rng.choice(active)
        middle.append((tid, pools[tid].pop(0)))
        if not pools[tid]:
            active.remove(tid)
    final_order = list(tile_ids)
    rng.shuffle(final_order)
    sequence = founding + middle + [(tid, finals[tid]) for tid in final_order]
    assert len(sequence) == N_IDEAS

    # Timeline: founding entries strictly spaced; the rest uniform with
    # occasional same-tick bursts of 2-3 entries.
    script: list[ScriptEvent] = []
    tick = 10
    for tid, text in sequence[: len(founding)]:
        script.append(ScriptEvent(at_tick=tick, event="idea", tile=tid, text=text))
        tick += FOUNDING_SPACING
    remaining = sequence[len(founding):]
    span = LAST_ENTRY - tick
    i = 0
    while i < len(remaining):
        burst = 1 if rng.random() < 0.8 else rng.choice((2, 3))
        group = sorted(remaining[i : i + burst], key=lambda e: e[0])
        for tid, text in group:
            script.append(ScriptEvent(at_tick=tick, event="idea", tile=tid, text=text))
        i += len(group)
        tick += max(2, round(span / max(1, len(remaining))) + rng.choice((-2, 0, 2, 4)))
    assert script[-1].at_tick <= LAST_ENTRY + 50

    # Two side bands keep starting positions clear of every parking zone.
    poses: list[tuple[int, Pose]] = []
    spots: list[tuple[float, float]] = []
    for band_x in (1.7, 3.5):
        for col in range(4):
            for row in range(8):
                spots.append((band_x + col * 0.25, 1.2 + row * 0.22))
    for tid in range(1, N_TILES + 1):
        x, y = spots[tid - 1]
        poses.append((tid, Pose(x=x, y=y, heading=0.0)))

    return Scenario(
        name="bristol63",
        duration_ticks=DURATION,
        threshold=0.3,
        provider="trigram-256",
        log_deliveries=False,
        arena=ArenaConfig(),
        network=NetworkConfig(latency_min=1, latency_max=1, drop_probability=0.0),
        markers=MarkerTable({1: (1, 1), 2: (5, 1), 3: (1, 3), 4: (5, 3), 5: (3, 2)}),
        tiles=tuple(poses),
        script=tuple(sorted(script, key=lambda e: e.at_tick)),
    )


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--check", action="store_true")
    args = parser.parse_args()

    scenario = build_scenario()
    ideas = [(e.tile, e.text) for e in scenario.script if e.event == "idea"]
    worst_cross, min_within = corpus_stats()
    print(f"ideas: {len(ideas)}  tiles: {len(scenario.tiles)}")
    print(f"worst cross-theme similarity: {worst_cross:.4f}")
    print(f"weakest within-theme similarity: {min_within:.4f}")
    print(f"last entry tick: {max(e.at_tick for e in scenario.script)}")
    assert worst_cross <= 0.30, "theme pools drifted: cross-theme pair above threshold"
    assert min_within >= 0.32, "theme pools drifted: within-theme pair too weak"
    if not args.check:
        OUT.write_text(dump_scenario(scenario), encoding="utf-8")
        print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
