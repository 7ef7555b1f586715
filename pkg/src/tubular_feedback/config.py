"""Flat ``key = value`` experiment configuration."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ParseError, UnknownKey
from .model import Grid, InitialDataSpec, ReactorParams
from .pde_sim import SimConfig

DEFAULT_ALPHAS = (-10.0, -1.0, 0.0, 0.5, 0.75, 0.9)

FLOAT_KEYS = ("D", "v", "l", "k", "n", "alpha", "mu", "alpha_max", "dt", "t_final")
INT_KEYS = ("nx",)
KEYS = FLOAT_KEYS + INT_KEYS

DEFAULTS = {
    "D": 0.0025,
    "v": 0.01,
    "l": 1.0,
    "k": 0.001,
    "n": 2.0,
    "alpha": 0.0,
    "mu": 0.9,
    "alpha_max": 0.95,
    "nx": 201,
    "dt": 0.05,
    "t_final": 2000.0,
}


@dataclass(frozen=True)
class SweepSpec:
    alphas: tuple
    params: ReactorParams
    init: InitialDataSpec
    sim: SimConfig
    outputs: Path = Path("results")
    alpha: float = 0.0
    m_amplitude: Optional[float] = None
    fit_window: float = 0.5
    guess: str = "zero"
    workers: Optional[int] = None
    values: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.alphas:
            raise ValueError("alpha list is empty")
        if len(set(self.alphas)) != len(self.alphas):
            raise ValueError("alpha list contains duplicates")
        bad = [a for a in self.alphas if not a < 1]
        if bad:
            raise ValueError(f"all gains must be < 1, got {bad}")


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, val = (s.strip() for s in line.partition("="))
        if key not in KEYS:
            raise UnknownKey(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = int(val) if key in INT_KEYS else float(val)
        except ValueError:
            raise ParseError(f"bad value {val!r} for {key}", lineno) from None
    return values


def load_config(path=None, overrides=None) -> SweepSpec:
    """Defaults, then the file at ``path``, then ``overrides``.

    Besides the file keys, ``overrides`` may carry ``alphas``, ``outputs``,
    ``m``, ``fit_window``, ``guess``, ``workers`` and ``snapshot_stride``.
    """
    values = dict(DEFAULTS)
    from_file = {}
    if path is not None:
        from_file = parse_config_text(Path(path).read_text())
        values.update(from_file)
    extra = {}
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key in KEYS:
            values[key] = int(val) if key in INT_KEYS else float(val)
        else:
            extra[key] = val
    allowed = {"alphas", "outputs", "m", "fit_window", "guess", "workers", "snapshot_stride"}
    unknown = set(extra) - allowed
    if unknown:
        raise UnknownKey(f"unknown override(s): {sorted(unknown)}")

    if "alphas" in extra:
        alphas = tuple(float(a) for a in extra["alphas"])
    elif "alpha" in from_file or (overrides or {}).get("alpha") is not None:
        alphas = (values["alpha"],)
    else:
        alphas = DEFAULT_ALPHAS

    params = ReactorParams(D=values["D"], v=values["v"], l=values["l"],
                           k=values["k"], n=values["n"])
    grid = Grid(params.l, int(values["nx"]))
    n_steps = int(round(values["t_final"] / values["dt"]))
    sim = SimConfig(grid=grid, dt=values["dt"], t_final=values["t_final"],
                    snapshot_stride=int(extra.get("snapshot_stride", max(n_steps // 10, 1))))
    return SweepSpec(
        alphas=alphas,
        params=params,
        init=InitialDataSpec(mu=values["mu"], alpha_max=values["alpha_max"]),
        sim=sim,
        outputs=Path(extra.get("outputs", "results")),
        alpha=values["alpha"],
        m_amplitude=extra.get("m"),
        fit_window=float(extra.get("fit_window", 0.5)),
        guess=extra.get("guess", "zero"),
        workers=extra.get("workers"),
        values=values,
    )
