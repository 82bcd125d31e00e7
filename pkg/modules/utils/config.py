"""Run configuration: JSON files, --override entries and environment fallbacks."""
import json
import os
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from modules.model.params import ModelParams
from modules.radial_tools.grid import DEFAULT_NODES, DEFAULT_R_MAX, RadialGrid
from modules.utils.errors import ConfigError

load_dotenv()

COMMANDS = ("qp", "astar", "solve", "excited", "scan-critical", "concentrate", "gncheck")
DEFAULT_OUTPUT_DIR = "output"

# Bare override keys that tune the continuation schedule rather than a solver constant.
SCHEDULE_KEYS = ("mu_values", "max_iter_stage", "eta", "energy_tol", "grad_tol", "n_seeds",
                 "rearrange_every", "polish_at_zero")

REQUIRED_PARAMS = {
    "qp": ("N", "p"),
    "astar": ("N",),
    "solve": ("N", "p", "a"),
    "excited": ("N", "p", "a"),
    "scan-critical": ("N",),
    "concentrate": ("N",),
    "gncheck": ("N", "p"),
}


def parse_override(entry: str):
    """Split `key=value`; the value is read as a JSON literal when possible."""
    if "=" not in entry:
        raise ConfigError(f"override '{entry}' is not of the form key=value", field="override")
    key, raw = entry.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError(f"override '{entry}' has an empty key", field="override")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


@dataclass(frozen=True)
class RunConfig:
    """One batch job: a command, its model parameters, grid, schedule and outputs."""
    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    grid: Dict[str, Any] = field(default_factory=dict)
    schedule: Dict[str, Any] = field(default_factory=dict)
    output_dir: Optional[str] = None
    seed_profile: Optional[str] = None
    k: Optional[int] = None
    masses: List[float] = field(default_factory=list)
    mass_ratios: List[float] = field(default_factory=list)
    offsets: List[float] = field(default_factory=list)
    overrides: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, payload: dict, overrides: Optional[List[str]] = None) -> "RunConfig":
        """Build and validate; overrides are applied first."""
        if not isinstance(payload, dict):
            raise ConfigError("configuration must be a JSON object")
        data = json.loads(json.dumps(payload))
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown keys {sorted(unknown)}", field="config")
        for entry in overrides or []:
            key, value = parse_override(entry)
            head, _, tail = key.partition(".")
            if tail:
                if head not in ("params", "grid", "schedule", "overrides"):
                    raise ConfigError(f"cannot override nested key '{key}'", field=key)
                data.setdefault(head, {})[tail] = value
            elif key in known and key != "overrides":
                data[key] = value
            elif key in SCHEDULE_KEYS:
                data.setdefault("schedule", {})[key] = value
            else:
                data.setdefault("overrides", {})[key] = value
        if "command" not in data:
            raise ConfigError("missing command", field="command")
        config = cls(**data)
        config.validate()
        return config

    @classmethod
    def load(cls, path, overrides: Optional[List[str]] = None) -> "RunConfig":
        if not os.path.exists(path):
            raise ConfigError(f"configuration not found at {path}", field="config")
        with open(path, encoding="utf-8") as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path} is not valid JSON: {exc}", field="config") from exc
        return cls.from_dict(payload, overrides)

    def validate(self):
        """Command-specific required fields, then the model invariants."""
        if self.command not in COMMANDS:
            raise ConfigError(f"'{self.command}' is not one of {', '.join(COMMANDS)}", field="command")
        for name in REQUIRED_PARAMS[self.command]:
            if name not in self.params:
                raise ConfigError(f"command '{self.command}' needs params.{name}", field=f"params.{name}")
        if self.command == "excited" and self.k is None:
            raise ConfigError("command 'excited' needs k", field="k")
        if self.command == "scan-critical" and not (self.masses or self.mass_ratios):
            raise ConfigError("command 'scan-critical' needs masses or mass_ratios", field="masses")
        if self.command == "concentrate" and not self.offsets:
            raise ConfigError("command 'concentrate' needs offsets", field="offsets")
        if any(d <= 0 for d in self.offsets):
            raise ConfigError("mass offsets must be positive", field="offsets")
        if self.command in ("solve", "excited", "gncheck"):
            self.model_params()
        self.radial_grid()

    def model_params(self) -> ModelParams:
        """ModelParams from the params section; raises ParameterError naming the hypothesis."""
        allowed = {"N", "p", "a", "theta", "mu"}
        extra = set(self.params) - allowed
        if extra:
            raise ConfigError(f"unknown model parameters {sorted(extra)}", field="params")
        values = dict(self.params)
        values.setdefault("a", 1.0)
        return ModelParams(**values)

    def radial_grid(self) -> RadialGrid:
        try:
            return RadialGrid.uniform(
                int(self.params.get("N", 1)),
                R_max=float(self.grid.get("R_max", DEFAULT_R_MAX)),
                n_nodes=int(self.grid.get("n_nodes", DEFAULT_NODES)),
            )
        except ValueError as exc:
            raise ConfigError(str(exc), field="grid") from exc

    def resolved_output_dir(self) -> str:
        return self.output_dir or os.getenv("QNLS_OUTPUT_DIR") or DEFAULT_OUTPUT_DIR

    def override(self, key: str, default=None):
        return self.overrides.get(key, default)

    def with_output_dir(self, output_dir: str) -> "RunConfig":
        return replace(self, output_dir=output_dir)

    def explicit_grid(self) -> Optional[RadialGrid]:
        """The configured grid, or None when the section is absent and the command picks its own."""
        return self.radial_grid() if self.grid else None
