"""Run configuration and the desk-scale parameter grids."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .eigen import DEFAULT_CAP
from .product import KINDS

SUITES = ("spectrum", "bgp-third", "tensor", "bounds", "degrees", "identity",
          "walks", "cospectral", "mixing", "application", "all")
GRID_N = (4, 6, 8, 10)
GRID_K = (1, 2, 3)
GRID_MAX_VERTICES = 1500
# connected bipartite bases with d <= n/4 and n <= 10 are only cycles, so the
# bipartite bound and mixing grids also take n = 12
BIPARTITE_BOUND_N = (4, 6, 8, 10, 12)


class ConfigError(ValueError):
    """Bad parameter or config file (CLI exit code 2)."""


def parse_seeds(text) -> tuple[int, ...]:
    """'1..20' → 1…20 inclusive; '1,4,9' → those seeds."""
    if text is None:
        return ()
    if isinstance(text, (list, tuple, range)):
        return tuple(int(s) for s in text)
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ConfigError(f"empty seed range {text!r}")
            return tuple(range(lo, hi + 1))
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise ConfigError(f"bad seed list {text!r}") from exc


@dataclass
class RunConfig:
    command: str = "verify"
    suite: str = "all"
    kind: str | None = None
    n: int | None = None
    d: int | None = None
    k: int | None = None
    t: int | None = None
    tau: str | None = None
    bipartite: bool = False
    connected: bool = False
    base: str | None = None
    seed: int = 0
    seeds: tuple[int, ...] = field(default_factory=tuple)
    tolerance: float = 1e-6
    cap: int = DEFAULT_CAP
    samples: int = 1000
    xi: float = 0.75
    jobs: int = 1
    output: str | None = None
    format: str = "json"
    csv: str | None = None

    def __post_init__(self):
        self.seeds = parse_seeds(self.seeds)
        self.validate()

    def validate(self) -> None:
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.kind is not None and self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.n is not None and self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.d is not None and (self.d < 0 or (self.n is not None and self.d >= self.n)):
            raise ConfigError("need 0 <= d < n")
        if self.k is not None and self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.t is not None and (self.t < 1 or (self.k is not None and self.t > self.k)):
            raise ConfigError("need 1 <= t <= k")
        if self.tau is not None and (self.k is not None and len(self.tau) != self.k):
            raise ConfigError("template length must equal k")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if not 0 < self.xi <= 1:
            raise ConfigError("xi must lie in (0, 1]")
        if self.cap < 1 or self.jobs < 1:
            raise ConfigError("cap and jobs must be >= 1")
        if self.format not in ("json", "csv", "edgelist"):
            raise ConfigError(f"unknown format {self.format!r}")

    @property
    def seed_list(self) -> tuple[int, ...]:
        return self.seeds or (self.seed, self.seed + 1, self.seed + 2)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["seeds"] = list(self.seed_list)
        # output locations do not change results; keep reports path-independent
        for key in ("output", "csv", "jobs"):
            out.pop(key)
        return out

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def _coerce(key: str, value: str):
    kind = str(_FIELD_TYPES[key])
    if value.lower() == "none" and "None" in kind:
        return None
    if key == "seeds":
        return parse_seeds(value)
    if kind == "bool":
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {value!r}")
    try:
        if kind.startswith("int"):
            return int(value)
        if kind.startswith("float"):
            return float(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: bad value {value!r}") from exc
    return value


def read_config_file(path) -> dict:
    """key = value lines; '#' starts a comment."""
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, value)
    return values


def build_config(file_values: dict | None = None, **flags) -> RunConfig:
    """Config-file values overridden by any flag that is not None."""
    merged = dict(file_values or {})
    merged.update({k: v for k, v in flags.items() if v is not None})
    try:
        return RunConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _pick(value, options):
    return options if value is None else (value,)


def _limit(cfg: RunConfig) -> int:
    """Grid size limit; an explicitly requested (n, k) may go up to the cap."""
    return cfg.cap if cfg.n is not None and cfg.k is not None else GRID_MAX_VERTICES


def gp_grid(cfg: RunConfig):
    """(n, d, k, t, seed) with d <= (n-1)/2, n·d even, n^k <= 1500."""
    for n in _pick(cfg.n, GRID_N):
        for d in _pick(cfg.d, range(1, (n - 1) // 2 + 1)):
            if (n * d) % 2:
                continue
            for k in _pick(cfg.k, GRID_K):
                if n**k > _limit(cfg):
                    continue
                for t in _pick(cfg.t, range(1, k + 1)):
                    for seed in cfg.seed_list:
                        yield n, d, k, t, seed


def bipartite_spectrum_grid(cfg: RunConfig):
    """Connected bipartite bases, 2 <= d <= n/2, n^k <= 1500."""
    for n in _pick(cfg.n, GRID_N):
        if n % 2:
            continue
        for d in _pick(cfg.d, range(2, n // 2 + 1)):
            for k in _pick(cfg.k, GRID_K):
                if n**k > _limit(cfg):
                    continue
                for t in _pick(cfg.t, range(1, k + 1)):
                    for seed in cfg.seed_list:
                        yield n, d, k, t, seed


def bipartite_bound_grid(cfg: RunConfig):
    """Connected bipartite bases with d <= n/4 and 2(n/2)^k <= 1500."""
    for n in _pick(cfg.n, BIPARTITE_BOUND_N):
        if n % 2:
            continue
        for d in _pick(cfg.d, range(2, n // 4 + 1)):
            for k in _pick(cfg.k, GRID_K):
                if 2 * (n // 2) ** k > _limit(cfg):
                    continue
                for t in _pick(cfg.t, range(1, k + 1)):
                    for seed in cfg.seed_list:
                        yield n, d, k, t, seed
