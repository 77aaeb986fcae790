"""Run configuration: a line-based key=value format with section prefixes,
chosen over positional flags so that runs archive and replay cleanly.
Every value is echoed into reports and certificates; the echo is enough to
rebuild the full working context (fields, tables, lambda) bit for bit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Mapping

from .diagram import LambdaSeq, build_registry, generate_lambda
from .gf import FieldDescriptor, make_field
from .weights import (
    GenericParams,
    OrbitIndexSet,
    WeightTuple,
    default_weight_table,
    load_weight_table,
)


class ConfigError(Exception):
    pass


# rng streams are decoupled so that commands draw independent randomness
# from the single recorded seed
_LAMBDA_STREAM = 0x1A3BDA
_BATTERY_STREAM = 0x5EEDBA


@dataclass
class RunConfig:
    seed: int = 1
    p: int = 5
    f: int = 3
    m: int = 2
    r: tuple = (1, 1, 1)
    modulus: tuple | None = None
    ext_modulus: tuple | None = None
    r_min: int | None = None
    r_max: int | None = None
    weights_table_path: str | None = None
    special_twist: int = 1
    lambda_mode: str = "twisted"
    lambda_seed: int | None = None
    lambda_overrides: dict = dc_field(default_factory=dict)
    target_window: int = 4
    working_window: int | None = None
    scalar_mode: str = "ext"
    mu: tuple = (1,)
    max_facts: int = 1_000_000
    max_firings: int = 10_000_000
    seed_count: int = 100
    seed_max_support: int = 4
    lab_enabled: bool = True
    lab_p: int = 3
    lab_f: int = 3
    zero_pow_zero: bool = True
    audit_n_max: int = 10

    @property
    def q(self) -> int:
        return self.p ** self.f

    @property
    def bounds(self) -> tuple[int, int]:
        lo = self.r_min if self.r_min is not None else 1
        hi = self.r_max if self.r_max is not None else self.p - 3
        return lo, hi

    def resolved_working_window(self) -> int:
        if self.working_window is not None:
            return self.working_window
        # margin: six loop steps per unit shift, once for the initial support
        # and once for the descent steps it may take
        return self.target_window + 6 * (2 * self.seed_max_support)

    def validate(self) -> None:
        if self.f < 1 or self.m < 1:
            raise ConfigError("field.f and field.m must be positive")
        if len(self.r) != self.f:
            raise ConfigError(f"field.r needs {self.f} entries, got {len(self.r)}")
        if self.lambda_mode not in ("rational", "twisted", "spanning", "degenerate"):
            raise ConfigError(f"unknown lambda.mode {self.lambda_mode!r}")
        if self.scalar_mode not in ("ext", "base"):
            raise ConfigError(f"unknown engine.scalar_mode {self.scalar_mode!r}")
        W = self.resolved_working_window()
        if W <= self.target_window:
            raise ConfigError(
                f"working window {W} must exceed target window {self.target_window}")
        if self.target_window < 0 or self.seed_max_support < 1:
            raise ConfigError("engine window and support bounds must be positive")
        if not (0 <= self.seed < 1 << 64):
            raise ConfigError("seed must fit in 64 bits")


def _parse_int_list(text: str) -> tuple:
    return tuple(int(x) for x in text.split(",") if x.strip() != "")


def _parse_bool(text: str) -> bool:
    v = text.strip().lower()
    if v in ("true", "1", "yes", "on"):
        return True
    if v in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def parse_config(text: str) -> RunConfig:
    cfg = RunConfig()
    setters = {
        "seed": ("seed", int),
        "field.p": ("p", int),
        "field.f": ("f", int),
        "field.m": ("m", int),
        "field.r": ("r", _parse_int_list),
        "field.modulus": ("modulus", _parse_int_list),
        "field.ext_modulus": ("ext_modulus", _parse_int_list),
        "field.r_min": ("r_min", int),
        "field.r_max": ("r_max", int),
        "weights.table": ("weights_table_path", str),
        "weights.special_twist": ("special_twist", int),
        "lambda.mode": ("lambda_mode", str),
        "lambda.seed": ("lambda_seed", int),
        "engine.target_window": ("target_window", int),
        "engine.working_window": ("working_window", int),
        "engine.scalar_mode": ("scalar_mode", str),
        "engine.mu": ("mu", _parse_int_list),
        "engine.max_facts": ("max_facts", int),
        "engine.max_firings": ("max_firings", int),
        "engine.seed_count": ("seed_count", int),
        "engine.seed_max_support": ("seed_max_support", int),
        "lab.enabled": ("lab_enabled", _parse_bool),
        "lab.p": ("lab_p", int),
        "lab.f": ("lab_f", int),
        "lab.zero_pow_zero": ("zero_pow_zero", _parse_bool),
        "audit.n_max": ("audit_n_max", int),
    }
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key.startswith("lambda.value."):
            try:
                idx = int(key[len("lambda.value."):])
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad lambda index") from exc
            cfg.lambda_overrides[idx] = _parse_int_list(value)
            continue
        if key not in setters:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        attr, conv = setters[key]
        try:
            setattr(cfg, attr, conv(value))
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"line {lineno}: {exc}") from exc
    cfg.validate()
    return cfg


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


# ---------------------------------------------------------------------------
# Working context
# ---------------------------------------------------------------------------

@dataclass
class WorkContext:
    config: RunConfig
    base: FieldDescriptor
    ext: FieldDescriptor
    params: GenericParams
    weight_table: Mapping[int, WeightTuple]
    registry: object
    lam: LambdaSeq | None
    mu: object  # base-field element


def build_fields(cfg: RunConfig) -> tuple[FieldDescriptor, FieldDescriptor]:
    base = make_field(cfg.p, cfg.f, cfg.modulus)
    ext = make_field(cfg.p, cfg.f * cfg.m, cfg.ext_modulus, parent=base)
    return base, ext


def build_weight_table(cfg: RunConfig, params: GenericParams):
    table = default_weight_table(params)
    if cfg.weights_table_path:
        table = load_weight_table(cfg.weights_table_path, params, table)
    return table


def build_context(cfg: RunConfig, need_lambda: bool = True) -> WorkContext:
    cfg.validate()
    base, ext = build_fields(cfg)
    params = GenericParams(cfg.p, cfg.f, tuple(cfg.r))
    table = build_weight_table(cfg, params)
    registry = build_registry(params, table, cfg.special_twist)
    lam = None
    if need_lambda:
        lam_seed = cfg.lambda_seed if cfg.lambda_seed is not None \
            else cfg.seed ^ _LAMBDA_STREAM
        rng = random.Random(lam_seed)
        overrides = {i: ext.element(coeffs)
                     for i, coeffs in cfg.lambda_overrides.items()}
        lam = generate_lambda(cfg.lambda_mode, base, ext,
                              cfg.resolved_working_window(), rng,
                              overrides or None)
    mu = base.element(cfg.mu)
    if mu.is_zero:
        raise ConfigError("engine.mu must be nonzero")
    return WorkContext(cfg, base, ext, params, table, registry, lam, mu)


def battery_rng(cfg: RunConfig) -> random.Random:
    return random.Random(cfg.seed ^ _BATTERY_STREAM)


# ---------------------------------------------------------------------------
# Echo and rebuild (the reproducibility surface)
# ---------------------------------------------------------------------------

def config_echo(ctx: WorkContext) -> dict:
    return echo_parts(ctx.config, ctx.base, ctx.ext, ctx.weight_table, ctx.lam)


def echo_parts(cfg: RunConfig, base: FieldDescriptor, ext: FieldDescriptor,
               weight_table, lam: LambdaSeq | None = None) -> dict:
    echo = {
        "seed": cfg.seed,
        "p": cfg.p,
        "f": cfg.f,
        "m": cfg.m,
        "q": cfg.q,
        "r": list(cfg.r),
        "modulus": list(base.modulus),
        "ext_modulus": list(ext.modulus),
        "genericity_bounds": list(cfg.bounds),
        "special_twist": cfg.special_twist,
        "weights": [
            {
                "J": mask,
                "members": sorted(weight_table[mask].label.members),
                "tuple": list(weight_table[mask].values),
                "twist": weight_table[mask].twist,
                "provenance": weight_table[mask].provenance,
            }
            for mask in sorted(weight_table)
        ],
        "scalar_mode": cfg.scalar_mode,
        "mu": list(cfg.mu),
        "target_window": cfg.target_window,
        "working_window": cfg.resolved_working_window(),
        "budget": {"max_facts": cfg.max_facts, "max_firings": cfg.max_firings},
        "battery": {"seed_count": cfg.seed_count,
                    "max_support": cfg.seed_max_support},
        "lab": {"enabled": cfg.lab_enabled, "p": cfg.lab_p, "f": cfg.lab_f,
                "q": cfg.lab_p ** cfg.lab_f,
                "zero_pow_zero": cfg.zero_pow_zero},
        "audit_n_max": cfg.audit_n_max,
        "conventions": {
            "character_encoding": "tuple (a_i) encodes e_a = sum a_i p^i + twist, "
                                  "e_d = twist; only exponent differences matter "
                                  "downstream",
            "closure_model": f"the algebraic closure is truncated to GF(q^{cfg.m}); "
                             "'spanning' means spanning that field over GF(q)",
            "coefficients": "little-endian over GF(p)",
        },
    }
    if lam is not None:
        echo["lambda"] = {
            "mode": lam.mode,
            "values": {str(i): list(v.coeffs)
                       for i, v in sorted(lam.values.items())},
        }
    return echo


def context_from_echo(echo: Mapping) -> WorkContext:
    """Rebuild fields, tables, registry and lambda from a config echo.

    Used by the replay path: the echo is the certificate's single source of
    truth, so a doctored echo produces a context that fails verification.
    """
    try:
        base = make_field(echo["p"], echo["f"], tuple(echo["modulus"]))
        ext = make_field(echo["p"], echo["f"] * echo["m"],
                         tuple(echo["ext_modulus"]), parent=base)
        params = GenericParams(echo["p"], echo["f"], tuple(echo["r"]))
        table = {}
        for w in echo["weights"]:
            J = OrbitIndexSet.from_bitmask(echo["f"], w["J"])
            table[w["J"]] = WeightTuple(J, tuple(w["tuple"]),
                                        w.get("provenance", "configured"),
                                        w.get("twist", 0))
        registry = build_registry(params, table, echo["special_twist"])
        lam = None
        if "lambda" in echo:
            values = {int(i): ext.element(tuple(coeffs))
                      for i, coeffs in echo["lambda"]["values"].items()}
            lam = LambdaSeq(base, ext, echo["working_window"], values,
                            echo["lambda"]["mode"])
        mu = base.element(tuple(echo["mu"]))
        cfg = RunConfig(
            seed=echo.get("seed", 0), p=echo["p"], f=echo["f"], m=echo["m"],
            r=tuple(echo["r"]), special_twist=echo["special_twist"],
            scalar_mode=echo.get("scalar_mode", "ext"), mu=tuple(echo["mu"]),
            target_window=echo["target_window"],
            working_window=echo["working_window"],
        )
        return WorkContext(cfg, base, ext, params, table, registry, lam, mu)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"config echo is incomplete or malformed: {exc}") from exc
