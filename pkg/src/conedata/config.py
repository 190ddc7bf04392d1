"""Flat `key = value` run configuration with sections and full defaults.

Every key has a default, so an empty file (or no file) is a valid run.
Unknown sections or keys are rejected by name.  Derived defaults use the
sentinel `auto`: cone.theta_inner resolves to theta/2, weight.r_star and
weight.r1 to the weight's own rules, the seed ramp to the library
default, solver.ball_radius to the seed norm at run time.  The emitted
effective configuration has all `auto` values resolved (where they are
known before running) and round-trips to an identical configuration.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass

from .errors import ConfigError
from .fields import ConeSpec, GridSpec
from .kernels import KernelProfile, RayConfig
from .seed import SeedSpec
from .solver import SolveConfig
from .weights import WeightFunction

# (parser kind, default); kinds: str, int, float, vec3, floats, autofloat
_SCHEMA = {
    "run": {
        "label": ("str", "default"),
        "s": ("float", 1.0),
        "q": ("int", 3),
        "eps0": ("float", 1e-3),
        "profile": ("str", "poly"),
        "eta_lo": ("autofloat", None),
        "eta_hi": ("autofloat", None),
        "threads": ("int", 1),
    },
    "cone": {
        "axis": ("vec3", (0.0, 0.0, 1.0)),
        "theta": ("float", 1.2),
        "theta_inner": ("autofloat", None),
    },
    "weight": {
        "kind": ("str", "iterlog"),
        "m": ("int", 1),
        "beta": ("floats", (1.0,)),
        "r_star": ("autofloat", None),
        "r1": ("autofloat", None),
        "const_value": ("float", 1.0),
    },
    "grid": {
        "n": ("int", 48),
        "half_width": ("float", 6.0),
        "order": ("int", 6),
    },
    "quad": {
        "cap_polar": ("int", 24),
        "cap_azimuth": ("int", 48),
        "ray_points": ("int", 4),
        "panel_len": ("float", 2.0),
        "tail_tol": ("float", 1e-8),
        "interp": ("str", "tricubic"),
    },
    "solver": {
        "tol": ("float", 1e-8),
        "max_iter": ("int", 40),
        "guard": ("float", 0.95),
        "ball_radius": ("autofloat", None),
    },
}


def _parse_value(kind: str, raw: str, where: str):
    raw = raw.strip()
    try:
        if kind == "str":
            return raw
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "autofloat":
            if raw.lower() == "auto":
                return None
            return float(raw)
        if kind == "vec3":
            parts = [float(p) for p in raw.split()]
            if len(parts) != 3:
                raise ValueError(f"expected three numbers, got {len(parts)}")
            return tuple(parts)
        if kind == "floats":
            parts = [float(p) for p in raw.split()]
            if not parts:
                raise ValueError("expected at least one number")
            return tuple(parts)
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} as {kind}: {exc}") from None
    raise ConfigError(f"{where}: unknown value kind {kind}")


def _format_value(kind: str, value) -> str:
    if value is None:
        return "auto"
    if kind in ("vec3", "floats"):
        return " ".join(repr(float(v)) for v in value)
    if kind == "str":
        return str(value)
    if kind == "int":
        return str(int(value))
    return repr(float(value))


@dataclass(frozen=True)
class RunConfig:
    """Parsed and validated configuration; builders construct module objects."""

    values: dict

    def get(self, section: str, key: str):
        return self.values[section][key]

    # ---- builders --------------------------------------------------------

    def cone(self) -> ConeSpec:
        try:
            return ConeSpec(
                axis=self.get("cone", "axis"),
                theta=self.get("cone", "theta"),
                theta_inner=self.get("cone", "theta_inner"),
            )
        except ValueError as exc:
            raise ConfigError(f"[cone]: {exc}") from None

    def weight(self) -> WeightFunction:
        try:
            if self.get("weight", "kind") == "const":
                return WeightFunction(kind="const",
                                      const_value=self.get("weight", "const_value"))
            return WeightFunction(
                m=self.get("weight", "m"),
                beta=self.get("weight", "beta"),
                R_star=self.get("weight", "r_star"),
                R1=self.get("weight", "r1"),
            )
        except ValueError as exc:
            raise ConfigError(f"[weight]: {exc}") from None

    def seed_spec(self) -> SeedSpec:
        lo, hi = self.get("run", "eta_lo"), self.get("run", "eta_hi")
        if (lo is None) != (hi is None):
            raise ConfigError("[run]: eta_lo and eta_hi must be set together")
        try:
            return SeedSpec(
                s=self.get("run", "s"),
                eps0=self.get("run", "eps0"),
                cone=self.cone(),
                weight=self.weight(),
                profile=self.get("run", "profile"),
                eta_transition=None if lo is None else (lo, hi),
            )
        except ValueError as exc:
            raise ConfigError(f"[run]: {exc}") from None

    def grid(self) -> GridSpec:
        try:
            return GridSpec(n=self.get("grid", "n"),
                            half_width=self.get("grid", "half_width"))
        except ValueError as exc:
            raise ConfigError(f"[grid]: {exc}") from None

    def fd_order(self) -> int:
        # stencil order for every discrete derivative taken in a pipeline run
        order = self.get("grid", "order")
        if order not in (2, 4, 6):
            raise ConfigError(f"[grid] order: must be 2, 4 or 6, got {order}")
        return order

    def kernel_profile(self) -> KernelProfile:
        try:
            return KernelProfile(
                self.cone(),
                n_polar=self.get("quad", "cap_polar"),
                n_azimuth=self.get("quad", "cap_azimuth"),
                profile=self.get("run", "profile"),
            )
        except ValueError as exc:
            raise ConfigError(f"[quad]: {exc}") from None

    def ray_config(self) -> RayConfig:
        try:
            return RayConfig(
                ray_points=self.get("quad", "ray_points"),
                panel_len=self.get("quad", "panel_len"),
                tail_tol=self.get("quad", "tail_tol"),
                interp=self.get("quad", "interp"),
            )
        except ValueError as exc:
            raise ConfigError(f"[quad]: {exc}") from None

    def solve_config(self) -> SolveConfig:
        try:
            return SolveConfig(
                tol=self.get("solver", "tol"),
                max_iter=self.get("solver", "max_iter"),
                ball_radius=self.get("solver", "ball_radius"),
                guard=self.get("solver", "guard"),
            )
        except ValueError as exc:
            raise ConfigError(f"[solver]: {exc}") from None

    def validate(self) -> "RunConfig":
        """Construct every module object once so bad values fail early."""
        s = self.get("run", "s")
        if not 1.0 <= s < 3.0:
            raise ConfigError(f"[run] s: must lie in [1, 3), got {s}")
        q = self.get("run", "q")
        if q < 0:
            raise ConfigError(f"[run] q: must be >= 0, got {q}")
        eps0 = self.get("run", "eps0")
        if not 0.0 <= eps0 <= 0.1:
            raise ConfigError(f"[run] eps0: must lie in [0, 0.1], got {eps0}")
        if self.get("run", "threads") < 1:
            raise ConfigError("[run] threads: must be >= 1")
        self.seed_spec()
        self.grid()
        self.fd_order()
        self.ray_config()
        self.solve_config()
        self.kernel_profile()
        return self


def default_config() -> RunConfig:
    values = {sec: {k: spec[1] for k, spec in keys.items()}
              for sec, keys in _SCHEMA.items()}
    return RunConfig(values)


def parse_config(text: str, origin: str = "<config>") -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError(f"{origin}: {exc}") from None
    values = {sec: {k: spec[1] for k, spec in keys.items()}
              for sec, keys in _SCHEMA.items()}
    for sec in parser.sections():
        if sec not in _SCHEMA:
            raise ConfigError(f"{origin}: unknown section [{sec}]")
        for key, raw in parser.items(sec):
            if key not in _SCHEMA[sec]:
                raise ConfigError(f"{origin}: unknown key {key!r} in section [{sec}]")
            kind = _SCHEMA[sec][key][0]
            values[sec][key] = _parse_value(kind, raw, f"{origin}: [{sec}] {key}")
    return RunConfig(values).validate()


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return default_config().validate()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, origin=path)


def emit_config(cfg: RunConfig) -> str:
    """Effective configuration text; parses back to an identical run.

    Derived `auto` values that resolve before running are written out
    explicitly (theta_inner, r_star, r1, the seed ramp); ball_radius
    stays `auto` because it is computed from the seed at run time.
    """
    resolved = {sec: dict(kv) for sec, kv in cfg.values.items()}
    cone = cfg.cone()
    resolved["cone"]["theta_inner"] = cone.theta_inner
    weight = cfg.weight()
    resolved["weight"]["r_star"] = weight.R_star
    resolved["weight"]["r1"] = weight.R1
    seed = cfg.seed_spec()
    resolved["run"]["eta_lo"], resolved["run"]["eta_hi"] = seed.eta_interval
    out = io.StringIO()
    for sec, keys in _SCHEMA.items():
        out.write(f"[{sec}]\n")
        for key, (kind, _) in keys.items():
            out.write(f"{key} = {_format_value(kind, resolved[sec][key])}\n")
        out.write("\n")
    return out.getvalue()
