"""Run configuration: ingestion knobs plus training knobs, file- and flag-sourced.

Config files are flat key=value text (snake_case keys); CLI flags override
file values. The manifest written by a run uses the same format, so any
manifest can be replayed as a config file.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from .artifacts import parse_kv_file
from .errors import ConfigInvalid
from .optimize import TrainConfig


@dataclass
class RunConfig:
    # ingestion
    n_superpixels: int = 580
    compactness: float = 1.0
    slic_iters: int = 10
    pca_components: int = 3
    rho: float = 0.2
    t_hop: int = 1
    # training (defaults follow the preset used for the largest reference scene)
    clusters: int = 0  # 0 means: derive from ground truth
    iterations: int = 50
    lr: float = 5e-4
    gamma: float = 0.3
    xi: float = 0.5
    eta: float = 0.05
    t_layers: int = 5
    k_order: int = 1
    embed_dim: int = 32
    warmup: int = 5
    p_interval: int = 25
    structure_interval: int = 1
    seed: int = 0
    normalize_embeddings: bool = True
    loss_sum_form: bool = False
    ablate_v1: bool = False
    ablate_v2: bool = False
    ablate_v3: bool = False
    figures: bool = False
    dump_embedding: bool = False

    def train_config(self, clusters: int) -> TrainConfig:
        return TrainConfig(
            clusters=clusters,
            iterations=self.iterations,
            lr=self.lr,
            gamma=self.gamma,
            xi=self.xi,
            eta=self.eta,
            t_layers=self.t_layers,
            k_order=self.k_order,
            embed_dim=self.embed_dim,
            warmup=self.warmup,
            p_interval=self.p_interval,
            structure_interval=self.structure_interval,
            rho=self.rho,
            seed=self.seed,
            normalize_embeddings=self.normalize_embeddings,
            loss_sum_form=self.loss_sum_form,
            ablate_v1=self.ablate_v1,
            ablate_v2=self.ablate_v2,
            ablate_v3=self.ablate_v3,
        )

    def as_dict(self) -> dict:
        return asdict(self)


_BOOL_STRINGS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _coerce(name: str, kind: type, raw: str):
    if kind is bool:
        key = raw.strip().lower()
        if key not in _BOOL_STRINGS:
            raise ConfigInvalid(f"{name}: cannot read {raw!r} as a boolean")
        return _BOOL_STRINGS[key]
    try:
        return kind(raw)
    except ValueError as exc:
        raise ConfigInvalid(f"{name}: cannot read {raw!r} as {kind.__name__}") from exc


# manifest echo keys that carry no tunable state; skipped on replay so a
# run manifest doubles as a config file
_ECHO_KEYS = {"cube", "sidecar", "gt", "outdir"}


def load_run_config(config_path=None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then config file, then explicit overrides (flags win)."""
    cfg = RunConfig()
    known = {f.name: f.type for f in fields(RunConfig)}
    types = {f.name: type(getattr(cfg, f.name)) for f in fields(RunConfig)}
    if config_path is not None:
        for key, raw in parse_kv_file(config_path).items():
            if key in _ECHO_KEYS or key.startswith("result_"):
                continue
            if key not in known:
                raise ConfigInvalid(f"unknown config key {key!r}")
            setattr(cfg, key, _coerce(key, types[key], raw))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in known:
            raise ConfigInvalid(f"unknown config key {key!r}")
        setattr(cfg, key, value)
    return cfg
