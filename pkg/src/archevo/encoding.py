"""Integer architecture encoding, decoding, and the analytic cost model.

A candidate network is a string of ``2 + stages * max_layers_per_stage``
integers (22 with the default space): position 0 indexes the input
resolution, position 1 the width multiplier, and the remaining positions
hold one option code per layer slot.  Code 0 marks an inactive layer and is
only legal in the optional tail slots of a stage; codes ``1..n`` map onto
the (expand_ratio, kernel_size) combinations of that slot sorted by
ascending multiply-add cost, so that neighbouring codes are neighbouring
compute budgets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class GenomeError(ValueError):
    """Raised when an integer string violates the encoding rules."""


@dataclass(frozen=True)
class SearchSpaceConfig:
    """Searchable options. Lists are ordered; indices are genome values."""

    resolutions: tuple[int, ...] = (192, 208, 224, 240, 256)
    width_multipliers: tuple[float, ...] = (1.0, 1.2)
    expand_ratios: tuple[int, ...] = (3, 4, 6)
    kernel_sizes: tuple[int, ...] = (3, 5, 7)
    stages: int = 5
    min_layers_per_stage: int = 2
    max_layers_per_stage: int = 4

    def __post_init__(self):
        if list(self.resolutions) != sorted(set(self.resolutions)):
            raise ValueError("resolutions must be strictly increasing")
        if list(self.width_multipliers) != sorted(set(self.width_multipliers)):
            raise ValueError("width_multipliers must be strictly increasing")
        if not (1 <= self.min_layers_per_stage <= self.max_layers_per_stage):
            raise ValueError("invalid layers-per-stage range")
        if self.stages < 1:
            raise ValueError("stages must be positive")

    @property
    def n_codes(self) -> int:
        """Number of active-layer option codes (codes run 1..n_codes)."""
        return len(self.expand_ratios) * len(self.kernel_sizes)

    @property
    def genome_length(self) -> int:
        return 2 + self.stages * self.max_layers_per_stage

    def layer_position(self, stage: int, slot: int) -> int:
        return 2 + stage * self.max_layers_per_stage + slot

    def slot_of(self, position: int) -> tuple[int, int]:
        """Map a layer position to (stage, slot-within-stage)."""
        stage, slot = divmod(position - 2, self.max_layers_per_stage)
        return stage, slot

    def skippable(self, position: int) -> bool:
        _, slot = self.slot_of(position)
        return slot >= self.min_layers_per_stage

    def position_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-position (lower, upper) integer bounds for variation."""
        low = np.zeros(self.genome_length, dtype=np.int64)
        high = np.zeros(self.genome_length, dtype=np.int64)
        high[0] = len(self.resolutions) - 1
        high[1] = len(self.width_multipliers) - 1
        for pos in range(2, self.genome_length):
            low[pos] = 0 if self.skippable(pos) else 1
            high[pos] = self.n_codes
        return low, high


@dataclass(frozen=True)
class CostModel:
    """Fixed structural constants used by the multiply-add / parameter counts.

    Channel counts follow the MobileNet family convention; after width
    scaling every count is rounded to a multiple of ``channel_round_to``
    (never below it).  ``num_classes`` sizes the final classifier.
    """

    stem_channels: int = 16
    stage_output_channels: tuple[int, ...] = (24, 40, 80, 112, 160)
    stage_strides: tuple[int, ...] = (2, 2, 2, 1, 2)
    tail_channels: int = 1280
    channel_round_to: int = 8
    num_classes: int = 1000

    def __post_init__(self):
        if len(self.stage_output_channels) != len(self.stage_strides):
            raise ValueError("stage channel/stride lists must have equal length")
        if any(s not in (1, 2) for s in self.stage_strides):
            raise ValueError("stage strides must be 1 or 2")

    def scale(self, channels: int, width_multiplier: float) -> int:
        """Width-scale a channel count and round to the channel multiple."""
        v = channels * width_multiplier
        rounded = max(
            self.channel_round_to,
            int(v + self.channel_round_to / 2)
            // self.channel_round_to
            * self.channel_round_to,
        )
        if rounded < 0.9 * v:
            rounded += self.channel_round_to
        return rounded


DEFAULT_SPACE = SearchSpaceConfig()
DEFAULT_COST = CostModel()


@dataclass(frozen=True)
class NetworkSpec:
    """Decoded network: resolution, width multiplier, per-stage layer options."""

    resolution: int
    width_multiplier: float
    stages: tuple[tuple[tuple[int, int], ...], ...]  # stage -> ((E, K), ...)

    def as_dict(self) -> dict:
        return {
            "resolution": self.resolution,
            "width_multiplier": self.width_multiplier,
            "stages": [
                [{"expand_ratio": e, "kernel_size": k} for e, k in stage]
                for stage in self.stages
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@lru_cache(maxsize=256)
def layer_code_tables(
    space: SearchSpaceConfig,
    cost: CostModel,
    resolution_index: int,
    width_index: int,
) -> tuple[tuple[tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]], ...]:
    """Per-stage (entry_table, rest_table) of (E, K) pairs in code order.

    Each table sorts the option combinations by the three-term layer cost
    (expand 1x1, depthwise KxK, project 1x1) evaluated at that slot's true
    channel counts, stride, and feature-map size; ties break on (E, K).
    Stage-entry layers change channel count and may stride, so they get
    their own ordering: this makes total multiply-adds non-decreasing in
    every layer code by construction.
    """
    wm = space.width_multipliers[width_index]
    resolution = space.resolutions[resolution_index]
    c_prev = cost.scale(cost.stem_channels, wm)
    h = _ceil_div(resolution, 2)  # stem is a stride-2 conv
    tables = []
    combos = [(e, k) for e in space.expand_ratios for k in space.kernel_sizes]
    for stage in range(space.stages):
        c_out = cost.scale(cost.stage_output_channels[stage], wm)
        stride = cost.stage_strides[stage]
        h_out = _ceil_div(h, stride)

        def slot_cost(e, k, c_in, c_o, h_in, h_o):
            expand = h_in * h_in * c_in * (e * c_in)
            depthwise = h_o * h_o * (e * c_in) * k * k
            project = h_o * h_o * (e * c_in) * c_o
            return expand + depthwise + project

        entry = tuple(
            sorted(combos, key=lambda ek: (slot_cost(*ek, c_prev, c_out, h, h_out), ek))
        )
        rest = tuple(
            sorted(combos, key=lambda ek: (slot_cost(*ek, c_out, c_out, h_out, h_out), ek))
        )
        tables.append((entry, rest))
        c_prev = c_out
        h = h_out
    return tuple(tables)


def validate_genome(values, space: SearchSpaceConfig = DEFAULT_SPACE) -> np.ndarray:
    """Check the encoding rules; return the values as an int array."""
    g = np.asarray(values, dtype=np.int64)
    if g.shape != (space.genome_length,):
        raise GenomeError(
            f"genome must have length {space.genome_length}, got shape {g.shape}"
        )
    if not 0 <= g[0] < len(space.resolutions):
        raise GenomeError(f"position 0: resolution index {g[0]} out of range")
    if not 0 <= g[1] < len(space.width_multipliers):
        raise GenomeError(f"position 1: width index {g[1]} out of range")
    for pos in range(2, space.genome_length):
        code = int(g[pos])
        if not 0 <= code <= space.n_codes:
            raise GenomeError(f"position {pos}: code {code} out of range")
        if code == 0 and not space.skippable(pos):
            raise GenomeError(f"position {pos}: skip not allowed at this slot")
    # inactive slots must form a contiguous suffix of each stage
    for stage in range(space.stages):
        seen_skip = False
        for slot in range(space.min_layers_per_stage, space.max_layers_per_stage):
            pos = space.layer_position(stage, slot)
            if g[pos] == 0:
                seen_skip = True
            elif seen_skip:
                raise GenomeError(f"position {pos}: active layer after a skipped slot")
    return g


def repair_skips(values, space: SearchSpaceConfig = DEFAULT_SPACE) -> np.ndarray:
    """Fix contiguity violations by shifting active codes into earlier slots.

    Keeps the layer options chosen by variation, only compacting them: a
    stage with pattern (.., 0, c) becomes (.., c, 0).
    """
    g = np.array(values, dtype=np.int64)
    for stage in range(space.stages):
        slots = [
            space.layer_position(stage, s)
            for s in range(space.min_layers_per_stage, space.max_layers_per_stage)
        ]
        active = [int(g[p]) for p in slots if g[p] != 0]
        for i, pos in enumerate(slots):
            g[pos] = active[i] if i < len(active) else 0
    return g


def decode(
    genome,
    space: SearchSpaceConfig = DEFAULT_SPACE,
    cost: CostModel = DEFAULT_COST,
) -> NetworkSpec:
    """Decode an integer string into a :class:`NetworkSpec`."""
    g = validate_genome(genome, space)
    tables = layer_code_tables(space, cost, int(g[0]), int(g[1]))
    stages = []
    for stage in range(space.stages):
        entry, rest = tables[stage]
        layers = []
        for slot in range(space.max_layers_per_stage):
            code = int(g[space.layer_position(stage, slot)])
            if code == 0:
                continue
            table = entry if slot == 0 else rest
            layers.append(table[code - 1])
        stages.append(tuple(layers))
    return NetworkSpec(
        resolution=space.resolutions[int(g[0])],
        width_multiplier=space.width_multipliers[int(g[1])],
        stages=tuple(stages),
    )


def encode(
    spec: NetworkSpec,
    space: SearchSpaceConfig = DEFAULT_SPACE,
    cost: CostModel = DEFAULT_COST,
) -> np.ndarray:
    """Inverse of :func:`decode` (table lookup)."""
    res_idx = space.resolutions.index(spec.resolution)
    width_idx = space.width_multipliers.index(spec.width_multiplier)
    tables = layer_code_tables(space, cost, res_idx, width_idx)
    g = np.zeros(space.genome_length, dtype=np.int64)
    g[0], g[1] = res_idx, width_idx
    for stage, layers in enumerate(spec.stages):
        entry, rest = tables[stage]
        for slot, ek in enumerate(layers):
            table = entry if slot == 0 else rest
            g[space.layer_position(stage, slot)] = table.index(tuple(ek)) + 1
    return g


def _scaled_channels(spec: NetworkSpec, cost: CostModel):
    wm = spec.width_multiplier
    stem = cost.scale(cost.stem_channels, wm)
    stage_cs = [cost.scale(c, wm) for c in cost.stage_output_channels]
    tail = cost.scale(cost.tail_channels, wm)
    return stem, stage_cs, tail


def madds_breakdown(spec: NetworkSpec, cost: CostModel = DEFAULT_COST) -> dict:
    """Multiply-add counts per structural block.

    Stem: 3x3 stride-2 conv from RGB.  Each layer: expand 1x1 at input
    resolution, depthwise KxK and project 1x1 at output resolution.  Tail:
    1x1 conv, global average pool (one multiply-add per pooled element),
    and the classifier matmul.
    """
    stem_c, stage_cs, tail_c = _scaled_channels(spec, cost)
    h = _ceil_div(spec.resolution, 2)
    out = {"stem": h * h * 3 * stem_c * 9, "stages": [], "tail_conv": 0}
    c_in = stem_c
    for stage, layers in enumerate(spec.stages):
        c_out = stage_cs[stage]
        total = 0
        for slot, (e, k) in enumerate(layers):
            stride = cost.stage_strides[stage] if slot == 0 else 1
            h_out = _ceil_div(h, stride)
            mid = e * c_in
            total += h * h * c_in * mid          # expand 1x1
            total += h_out * h_out * mid * k * k  # depthwise KxK
            total += h_out * h_out * mid * c_out  # project 1x1
            h = h_out
            c_in = c_out
        out["stages"].append(total)
    out["tail_conv"] = h * h * c_in * tail_c
    out["pool"] = h * h * tail_c
    out["classifier"] = tail_c * cost.num_classes
    return out


def madds(spec: NetworkSpec, cost: CostModel = DEFAULT_COST) -> int:
    b = madds_breakdown(spec, cost)
    return b["stem"] + sum(b["stages"]) + b["tail_conv"] + b["pool"] + b["classifier"]


def params_breakdown(spec: NetworkSpec, cost: CostModel = DEFAULT_COST) -> dict:
    """Weight counts (conv kernels and classifier matrix; no bias/norm terms)."""
    stem_c, stage_cs, tail_c = _scaled_channels(spec, cost)
    out = {"stem": 3 * stem_c * 9, "stages": []}
    c_in = stem_c
    for stage, layers in enumerate(spec.stages):
        c_out = stage_cs[stage]
        total = 0
        for e, k in layers:
            mid = e * c_in
            total += c_in * mid + mid * k * k + mid * c_out
            c_in = c_out
        out["stages"].append(total)
    out["tail_conv"] = c_in * tail_c
    out["classifier"] = tail_c * cost.num_classes
    return out


def params(spec: NetworkSpec, cost: CostModel = DEFAULT_COST) -> int:
    b = params_breakdown(spec, cost)
    return b["stem"] + sum(b["stages"]) + b["tail_conv"] + b["classifier"]


def sample_uniform(
    space: SearchSpaceConfig = DEFAULT_SPACE,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Random valid genome: uniform resolution/width/depth, uniform layer codes."""
    rng = rng or np.random.default_rng()
    g = np.zeros(space.genome_length, dtype=np.int64)
    g[0] = rng.integers(len(space.resolutions))
    g[1] = rng.integers(len(space.width_multipliers))
    for stage in range(space.stages):
        depth = int(
            rng.integers(space.min_layers_per_stage, space.max_layers_per_stage + 1)
        )
        for slot in range(space.max_layers_per_stage):
            pos = space.layer_position(stage, slot)
            g[pos] = rng.integers(1, space.n_codes + 1) if slot < depth else 0
    return g


def maximal_genome(space: SearchSpaceConfig = DEFAULT_SPACE) -> np.ndarray:
    """Full-depth genome with every option index at its maximum."""
    g = np.full(space.genome_length, space.n_codes, dtype=np.int64)
    g[0] = len(space.resolutions) - 1
    g[1] = len(space.width_multipliers) - 1
    return g


def genome_key(genome) -> tuple[int, ...]:
    """Hashable identity used for archive/population deduplication."""
    return tuple(int(v) for v in genome)


def genome_to_json(genome) -> str:
    return json.dumps([int(v) for v in genome])


def genome_from_json(text: str, space: SearchSpaceConfig = DEFAULT_SPACE) -> np.ndarray:
    return validate_genome(json.loads(text), space)
