"""The LoRA configuration space: grid enumeration with the alpha = 2*rank
tie, trainable-parameter counting, and rank-halving param-matched pairs."""

from __future__ import annotations

from dataclasses import dataclass

SCHEMES = ("baseline", "qv_only", "full_attention")
SCHEME_PROJECTIONS = {
    "qv_only": ("q", "v"),
    "full_attention": ("q", "k", "v", "o"),
}

# Training hyperparameters carried for provenance only; never executed here.
TRAINING_METADATA = {
    "num_train_epochs": 8,
    "learning_rate": 2e-5,
    "lora_dropout": 0.05,
    "bias": "none",
    "task_type": "CAUSAL_LM",
    "precision": "bf16",
    "warmup_fraction": 0.03,
    "embed_top_k": 2,
}


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    base_model: str
    scheme: str
    rank: int | None = None
    lora_alpha: int | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise GridError(f"unknown scheme {self.scheme!r}")
        if self.scheme == "baseline":
            if self.rank is not None:
                raise GridError("baseline configs carry no rank")
        else:
            if self.rank is None or self.rank < 1:
                raise GridError("adapter configs need a positive rank")
            expected = 2 * self.rank
            if self.lora_alpha is None:
                object.__setattr__(self, "lora_alpha", expected)
            elif self.lora_alpha != expected:
                raise GridError(
                    f"lora_alpha must equal 2*rank ({expected}), got {self.lora_alpha}"
                )

    @property
    def display_id(self) -> str:
        if self.scheme == "baseline":
            return f"{self.base_model} baseline"
        return f"{self.base_model} r{self.rank} {self.scheme}"


@dataclass(frozen=True)
class ModelDims:
    """Per-projection (in, out) dimensions; k/v may be smaller than q/o under
    grouped-query attention."""

    n_layers: int
    projections: dict  # name ("q","k","v","o") -> (d_in, d_out)

    def __post_init__(self):
        if self.n_layers < 1:
            raise GridError("n_layers must be positive")
        for name, (d_in, d_out) in self.projections.items():
            if d_in < 1 or d_out < 1:
                raise GridError(f"projection {name!r} dims must be positive")

    @classmethod
    def uniform(cls, n_layers: int, d: int) -> "ModelDims":
        return cls(n_layers=n_layers, projections={p: (d, d) for p in "qkvo"})


@dataclass(frozen=True)
class ParamMatchedPair:
    qv_config: GeneratorConfig
    full_config: GeneratorConfig
    budget_label: str

    def __post_init__(self):
        if self.qv_config.scheme != "qv_only" or self.full_config.scheme != "full_attention":
            raise GridError("pair must be (qv_only, full_attention)")
        if self.qv_config.base_model != self.full_config.base_model:
            raise GridError("paired configs must share a base model")
        if self.full_config.rank * 2 != self.qv_config.rank:
            raise GridError("full_attention rank must be half the qv_only rank")


def enumerate_grid(base_models, ranks, schemes=("qv_only", "full_attention")) -> list[GeneratorConfig]:
    """One config per (base, rank, scheme) plus one baseline per base."""
    for r in ranks:
        if r < 1:
            raise GridError(f"rank must be positive, got {r}")
    for s in schemes:
        if s not in ("qv_only", "full_attention"):
            raise GridError(f"invalid grid scheme {s!r}")
    configs: list[GeneratorConfig] = []
    seen: set[tuple] = set()
    for base in base_models:
        configs.append(GeneratorConfig(base_model=base, scheme="baseline"))
        for rank in ranks:
            for scheme in schemes:
                cell = (base, rank, scheme)
                if cell in seen:
                    raise GridError(f"duplicate grid cell {cell}")
                seen.add(cell)
                configs.append(
                    GeneratorConfig(base_model=base, scheme=scheme, rank=rank)
                )
    return configs


def trainable_params(dims: ModelDims, rank: int, scheme: str) -> int:
    """Total LoRA parameters: rank*(d_in + d_out) per targeted projection per
    layer."""
    if scheme == "baseline":
        raise GridError("baseline has no trainable LoRA parameters")
    if scheme not in SCHEME_PROJECTIONS:
        raise GridError(f"unknown scheme {scheme!r}")
    if rank < 1:
        raise GridError(f"rank must be positive, got {rank}")
    per_layer = sum(
        rank * (dims.projections[p][0] + dims.projections[p][1])
        for p in SCHEME_PROJECTIONS[scheme]
    )
    return dims.n_layers * per_layer


def param_matched_pairs(grid: list[GeneratorConfig]) -> list[ParamMatchedPair]:
    """Pair each qv_only rank r with the same base's full_attention rank r/2;
    ranks without a half-partner are skipped."""
    by_cell = {
        (c.base_model, c.scheme, c.rank): c for c in grid if c.scheme != "baseline"
    }
    pairs: list[ParamMatchedPair] = []
    for config in grid:
        if config.scheme != "qv_only" or config.rank % 2 != 0:
            continue
        partner = by_cell.get((config.base_model, "full_attention", config.rank // 2))
        if partner is None:
            continue
        pairs.append(
            ParamMatchedPair(
                qv_config=config,
                full_config=partner,
                budget_label=f"{4 * config.rank}d",
            )
        )
    return pairs
