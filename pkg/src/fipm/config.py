"""Flat ``key = value`` experiment configuration.

The on-disk format is one pair per line, ``#`` starts a comment line, and
unknown keys are rejected so a typo cannot silently fall back to a default.
Cross-field compatibility (closure vs. filter vs. regularization) is checked
up front; a run built from a valid configuration can only abort for genuinely
numerical reasons.  ``to_text`` emits a canonical echo with every default
resolved, and parsing that echo reproduces the configuration exactly, which
is what makes reruns byte-reproducible.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .filters import FilterKind, FilterSpec
from .solver import Closure, EulerPhysics, GridConfig, MomentSolver, UncertainShockIC

CLOSURES = ("sg", "fsg", "ipm", "fipm-realizable", "fipm-regularized")
FILTERS = ("none", "l2", "exponential", "erfc", "fokker-planck")

_FILTER_KINDS = {
    "l2": FilterKind.L2,
    "exponential": FilterKind.EXPONENTIAL,
    "erfc": FilterKind.ERFC,
    "fokker-planck": FilterKind.FOKKER_PLANCK,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One shock-tube experiment: grid, uncertain Riemann data, closure, filter."""

    a: float
    b: float
    n_cells: int
    t_end: float
    x0: float
    sigma: float
    rho_l: float
    p_l: float
    rho_r: float
    p_r: float
    degree: int
    n_quad: int
    closure: str
    cfl: float = 0.5
    gamma: float = 1.4
    filter: str = "none"
    filter_strength: float = 0.0
    filter_order: int = 2
    eta: float = 0.0
    tau: float = 1e-7
    delta_lo: float = 0.7
    delta_hi: float = 0.8
    seed: int = 0
    output_dir: str = "runs/out"

    def __post_init__(self):
        object.__setattr__(self, "closure", self.closure.lower())
        object.__setattr__(self, "filter", self.filter.lower())
        if self.closure not in CLOSURES:
            raise ConfigError(
                f"closure must be one of {', '.join(CLOSURES)}; got '{self.closure}'"
            )
        if self.filter not in FILTERS:
            raise ConfigError(
                f"filter must be one of {', '.join(FILTERS)}; got '{self.filter}'"
            )
        try:
            grid = self.grid()
            self.ic().validate_inside(grid)
        except ValueError as err:
            raise ConfigError(str(err)) from None
        if self.gamma <= 1.0:
            raise ConfigError(f"gamma must exceed 1, got {self.gamma}")
        if self.degree < 0:
            raise ConfigError(f"degree must be nonnegative, got {self.degree}")
        if self.n_quad < self.degree + 1:
            raise ConfigError(
                f"n_quad must be at least degree+1 = {self.degree + 1}, got {self.n_quad}"
            )
        if self.eta < 0:
            raise ConfigError(f"eta must be nonnegative, got {self.eta}")
        if self.tau <= 0:
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if not self.a <= self.delta_lo < self.delta_hi <= self.b:
            raise ConfigError(
                f"oscillation region [{self.delta_lo}, {self.delta_hi}] must be an "
                f"interval inside the domain [{self.a}, {self.b}]"
            )
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}")
        self.filter_spec()  # validates strength and order for the chosen kind
        self._check_compatibility()

    def _check_compatibility(self):
        closure, filt = self.closure, self.filter
        if closure in ("sg", "fsg") and self.eta != 0.0:
            raise ConfigError("Galerkin closures take no regularization; set eta = 0")
        if closure == "sg" and filt != "none":
            raise ConfigError("closure sg takes no filter; use closure fsg")
        if closure == "ipm" and filt != "none":
            raise ConfigError(
                "closure ipm takes no filter; use fipm-realizable or fipm-regularized"
            )
        if closure == "fipm-realizable":
            if filt != "fokker-planck":
                raise ConfigError(
                    f"fipm-realizable requires the fokker-planck filter, got '{filt}'"
                )
            if self.eta != 0.0:
                raise ConfigError("fipm-realizable solves the exact dual; set eta = 0")
        if closure == "fipm-regularized" and self.eta <= 0.0:
            raise ConfigError("fipm-regularized requires eta > 0")

    # -- derived objects -----------------------------------------------------

    def grid(self) -> GridConfig:
        return GridConfig(self.a, self.b, self.n_cells, self.t_end, self.cfl)

    def ic(self) -> UncertainShockIC:
        return UncertainShockIC(
            self.rho_l, self.p_l, self.rho_r, self.p_r, self.x0, self.sigma
        )

    def filter_spec(self) -> FilterSpec | None:
        if self.filter == "none":
            return None
        return FilterSpec(
            _FILTER_KINDS[self.filter], self.filter_strength, order=self.filter_order
        )

    def solver_closure(self) -> Closure:
        # an ipm run with eta > 0 is exactly the regularized loop without filter
        if self.closure == "ipm" and self.eta > 0.0:
            return Closure.FIPM_REGULARIZED
        return Closure(self.closure)

    def delta_region(self) -> tuple[float, float]:
        return (self.delta_lo, self.delta_hi)

    def build_solver(self) -> MomentSolver:
        return MomentSolver(
            self.grid(),
            self.degree,
            self.n_quad,
            EulerPhysics(self.gamma),
            closure=self.solver_closure(),
            filter_spec=self.filter_spec(),
            eta=self.eta,
            tau=self.tau,
        )

    # -- canonical echo --------------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            text = repr(value) if isinstance(value, float) else str(value)
            lines.append(f"{field.name} = {text}")
        return "\n".join(lines) + "\n"


_TYPES = {
    field.name: {"float": float, "int": int, "str": str}[field.type]
    for field in dataclasses.fields(ExperimentConfig)
}
_REQUIRED = frozenset(
    field.name
    for field in dataclasses.fields(ExperimentConfig)
    if field.default is dataclasses.MISSING
)


def _split_pairs(text: str, source: str):
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, raw = stripped.partition("=")
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        pairs.append((key.strip(), raw.strip(), lineno))
    return pairs


def _convert(key: str, raw: str, where: str):
    kind = _TYPES[key]
    if kind is str:
        return raw
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(
            f"{where}: key '{key}' expects {kind.__name__}, got '{raw}'"
        ) from None


def parse_config(text: str, source: str = "<config>", overrides=()) -> ExperimentConfig:
    """Parse a flat configuration, apply ``key=value`` override strings, validate.

    Raises ConfigError naming the offending key and line for unknown keys,
    duplicates, type mismatches, missing required keys, and any cross-field
    incompatibility.
    """
    values: dict[str, object] = {}
    for key, raw, lineno in _split_pairs(text, source):
        where = f"{source}:{lineno}"
        if key not in _TYPES:
            raise ConfigError(f"{where}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"{where}: duplicate key '{key}'")
        values[key] = _convert(key, raw, where)
    for item in overrides:
        key, sep, raw = item.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key:
            raise ConfigError(f"override '{item}' must have the form key=value")
        if key not in _TYPES:
            raise ConfigError(f"override: unknown key '{key}'")
        values[key] = _convert(key, raw, "override")
    missing = sorted(_REQUIRED - values.keys())
    if missing:
        raise ConfigError(f"{source}: missing required keys: {', '.join(missing)}")
    try:
        return ExperimentConfig(**values)
    except ConfigError as err:
        raise ConfigError(f"{source}: {err}") from None


# -- realizability-scan configuration ----------------------------------------------


@dataclass(frozen=True)
class ScanConfig:
    """Raster scan of filter images over the degree-two realizable set."""

    exp_exponents: tuple[float, ...] = (0.05, 0.1, 0.2, 0.3)
    fp_strengths: tuple[float, ...] = (0.05, 0.1, 0.2, 0.3)
    resolution: int = 400
    order: int = 7
    output_dir: str = "runs/figure1"

    def __post_init__(self):
        object.__setattr__(self, "exp_exponents", tuple(self.exp_exponents))
        object.__setattr__(self, "fp_strengths", tuple(self.fp_strengths))
        if self.resolution < 2:
            raise ConfigError(f"resolution must be at least 2, got {self.resolution}")
        if self.order < 1:
            raise ConfigError(f"order must be at least 1, got {self.order}")
        for name in ("exp_exponents", "fp_strengths"):
            values = getattr(self, name)
            if any(v < 0 for v in values):
                raise ConfigError(f"{name} must be nonnegative, got {values}")

    def to_text(self) -> str:
        lines = []
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if isinstance(value, tuple):
                text = ", ".join(repr(float(v)) for v in value)
            else:
                text = str(value)
            lines.append(f"{field.name} = {text}")
        return "\n".join(lines) + "\n"


_SCAN_LISTS = ("exp_exponents", "fp_strengths")
_SCAN_TYPES = {"resolution": int, "order": int, "output_dir": str}


def parse_scan_config(text: str, source: str = "<config>") -> ScanConfig:
    values: dict[str, object] = {}
    for key, raw, lineno in _split_pairs(text, source):
        where = f"{source}:{lineno}"
        if key in values:
            raise ConfigError(f"{where}: duplicate key '{key}'")
        if key in _SCAN_LISTS:
            try:
                values[key] = tuple(float(tok) for tok in raw.split(",") if tok.strip())
            except ValueError:
                raise ConfigError(
                    f"{where}: key '{key}' expects comma-separated floats, got '{raw}'"
                ) from None
        elif key in _SCAN_TYPES:
            kind = _SCAN_TYPES[key]
            try:
                values[key] = kind(raw) if kind is not str else raw
            except ValueError:
                raise ConfigError(
                    f"{where}: key '{key}' expects {kind.__name__}, got '{raw}'"
                ) from None
        else:
            raise ConfigError(f"{where}: unknown key '{key}'")
    try:
        return ScanConfig(**values)
    except ConfigError as err:
        raise ConfigError(f"{source}: {err}") from None


# -- bundled presets -------------------------------------------------------------


def _preset_root():
    return resources.files("fipm") / "presets"


def list_presets() -> list[str]:
    return sorted(
        entry.name[: -len(".cfg")]
        for entry in _preset_root().iterdir()
        if entry.name.endswith(".cfg")
    )


def read_config_text(name_or_path: str) -> tuple[str, str]:
    """Resolve a preset name or a path to configuration text.

    Returns (text, source label).  Preset names win over paths so the bundled
    experiments stay addressable from any working directory.
    """
    preset = _preset_root() / f"{name_or_path}.cfg"
    if preset.is_file():
        return preset.read_text(), f"preset:{name_or_path}"
    path = Path(name_or_path)
    if path.is_file():
        return path.read_text(), str(path)
    raise ConfigError(
        f"'{name_or_path}' is neither a bundled preset ({', '.join(list_presets())}) "
        f"nor a configuration file"
    )


def load_config(name_or_path: str, overrides=()) -> ExperimentConfig:
    text, source = read_config_text(name_or_path)
    return parse_config(text, source=source, overrides=overrides)
