"""Scenario config files: TOML with one dotted key per line.

Example::

    name = "ajr"
    mechanism = "baseline-cutoff"
    mix.0.proportion = 0.4
    mix.0.profile.benefit = 2.0
    costs.cost_z0 = 1.5
    noise.u_sd = 0.5

:func:`dumps` writes every field so the echo fully describes the run, and
:func:`loads` of that text gives back an equal config. Table syntax
(``[costs]``) parses too, since it is the same TOML document.
"""

from __future__ import annotations

import json
import re
import sys

from .errors import ConfigError
from .history import CostSchedule, NoiseModel, ShockProcess
from .population import InstrumentRule, LocationProfile, TraitLaw, TypeMix
from .scenarios import ScenarioConfig, Thresholds, build_scenario, constructor_params

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_PROFILE_KEYS = ("benefit", "return_beta", "persist_p", "persist_q", "rho", "latent_trait")
_SECTIONS = {
    "costs": (CostSchedule, ("cost_z0", "cost_z1", "shock_sensitivity", "reversal_feedback")),
    "instrument": (InstrumentRule, ("kind", "share")),
    "noise": (NoiseModel, ("alpha", "u_sd", "eps_sd")),
    "s_process": (ShockProcess, ("kind", "lo", "hi", "sd")),
    "thresholds": (Thresholds, ("x_tilde", "x_bar", "rho_low", "rho_high")),
}
_STR_KEYS = {"kind", "name", "mechanism", "oracle"}
_INT_KEYS = {"n", "reps", "horizon"}
_TOP = ("name", "mechanism", "oracle", "n", "reps", "horizon", "benefit_noise")


def to_flat(cfg: ScenarioConfig) -> dict:
    flat = {k: getattr(cfg, k) for k in _TOP}
    for i, (prop, prof) in enumerate(cfg.mix.components):
        flat[f"mix.{i}.proportion"] = prop
        for k in _PROFILE_KEYS:
            flat[f"mix.{i}.profile.{k}"] = getattr(prof, k)
        law = prof.trait_law
        if law is not None:
            flat[f"mix.{i}.profile.trait_law.kind"] = law.kind
            if law.kind == "uniform":
                flat[f"mix.{i}.profile.trait_law.lo"] = law.lo
                flat[f"mix.{i}.profile.trait_law.hi"] = law.hi
            else:
                flat[f"mix.{i}.profile.trait_law.values"] = list(law.values)
                flat[f"mix.{i}.profile.trait_law.weights"] = list(law.weights)
    for section, (_, keys) in _SECTIONS.items():
        obj = getattr(cfg, section)
        if obj is None:
            continue
        for k in keys:
            v = getattr(obj, k)
            if v is not None:
                flat[f"{section}.{k}"] = v
    return flat


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(float(x)) for x in v) + "]"
    raise TypeError(f"cannot format {v!r}")


def dumps(cfg: ScenarioConfig) -> str:
    return "".join(f"{k} = {_fmt(v)}\n" for k, v in to_flat(cfg).items())


def _flatten(tree: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in tree.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _line_index(text: str) -> dict[str, int]:
    """Map each dotted key to the 1-based line where it is assigned."""
    lines = {}
    table = ""
    for no, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        m = re.match(r"^\[([^\]]+)\]$", s)
        if m:
            table = m.group(1).strip() + "."
            continue
        m = re.match(r"^([A-Za-z0-9_.\-]+)\s*=", s)
        if m:
            lines.setdefault(table + m.group(1), no)
    return lines


def _cast(key: str, v, line: int | None):
    leaf = key.rsplit(".", 1)[-1]
    try:
        if leaf in _STR_KEYS:
            if not isinstance(v, str):
                raise TypeError
            return v
        if leaf in _INT_KEYS:
            if isinstance(v, bool) or not (isinstance(v, int) or (isinstance(v, float) and v.is_integer())):
                raise TypeError
            return int(v)
        if leaf in ("values", "weights"):
            return tuple(_cast("x", x, line) for x in v)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise TypeError
        return float(v)
    except TypeError:
        raise ConfigError(f"{key}: unexpected value {v!r}", line=line) from None


def from_flat(flat: dict, lines: dict[str, int] | None = None) -> ScenarioConfig:
    lines = lines or {}

    def line_of(prefix):
        hits = [n for k, n in lines.items() if k == prefix or k.startswith(prefix + ".")]
        return min(hits) if hits else None

    flat = {k: _cast(k, v, lines.get(k)) for k, v in flat.items()}
    for required in ("name", "mechanism"):
        if required not in flat:
            raise ConfigError(f"missing required key {required!r}")
    used = set()

    def take(key, default=None):
        used.add(key)
        return flat.get(key, default)

    mix_ids = sorted({int(m.group(1)) for k in flat if (m := re.match(r"^mix\.(\d+)\.", k))})
    comps = []
    try:
        for i in mix_ids:
            base = f"mix.{i}"
            law = None
            if f"{base}.profile.trait_law.kind" in flat:
                lk = f"{base}.profile.trait_law"
                law = TraitLaw(
                    kind=take(f"{lk}.kind"),
                    lo=take(f"{lk}.lo", 0.0),
                    hi=take(f"{lk}.hi", 1.0),
                    values=take(f"{lk}.values", ()),
                    weights=take(f"{lk}.weights", ()),
                )
            prof = LocationProfile(
                **{k: take(f"{base}.profile.{k}") for k in _PROFILE_KEYS if f"{base}.profile.{k}" in flat},
                trait_law=law,
            )
            if f"{base}.proportion" not in flat:
                raise ConfigError(f"{base}.proportion is missing", line=line_of(base))
            comps.append((take(f"{base}.proportion"), prof))
        mix = TypeMix(tuple(comps))
    except ConfigError as exc:
        if exc.line is not None:
            raise
        raise ConfigError(str(exc), line=line_of("mix")) from None

    kwargs = {}
    for section, (cls, keys) in _SECTIONS.items():
        present = {k: take(f"{section}.{k}") for k in keys if f"{section}.{k}" in flat}
        if present:
            try:
                kwargs[section] = cls(**present)
            except ConfigError as exc:
                raise ConfigError(str(exc), line=line_of(section)) from None
            except TypeError:
                missing = [k for k in keys if k not in present]
                raise ConfigError(f"section {section} is incomplete; set {', '.join(missing)}", line=line_of(section)) from None
        elif section == "costs" or (section == "instrument" and flat["mechanism"] == "continuous-proxy"):
            kwargs[section] = None

    for k in _TOP:
        if k in flat:
            kwargs[k] = take(k)
    unknown = sorted(set(flat) - used, key=lambda k: lines.get(k, 0))
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r}", line=lines.get(unknown[0]))
    try:
        return ScenarioConfig(mix=mix, **kwargs)
    except ConfigError as exc:
        if exc.line is not None:
            raise
        raise ConfigError(str(exc), line=line_of("mechanism")) from None


def loads(text: str) -> ScenarioConfig:
    try:
        tree = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"not valid TOML: {exc}") from None
    return from_flat(_flatten(tree), _line_index(text))


def load(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return loads(text)


def parse_value(text: str):
    """Read a ``--set`` value as a TOML literal, falling back to a bare string."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def apply_overrides(cfg: ScenarioConfig, assignments, scenario: str | None = None) -> ScenarioConfig:
    """Apply ``KEY=VALUE`` overrides.

    Keys naming a constructor parameter of ``scenario`` (e.g. ``q2`` for
    markov) rebuild the scenario from its constructor, which discards earlier
    edits to ``cfg``. Dotted keys and top-level fields are then applied to
    the config directly.
    """
    params, direct = {}, []
    for item in assignments:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not KEY=VALUE")
        key, value = (s.strip() for s in item.split("=", 1))
        value = parse_value(value)
        if scenario is not None and "." not in key and key in constructor_params(scenario):
            params[key] = tuple(value) if isinstance(value, list) else value
        else:
            direct.append((key, value))
    if params:
        cfg = build_scenario(scenario, **params)
    if direct:
        flat = to_flat(cfg)
        for key, value in direct:
            flat[key] = value
        cfg = from_flat(flat)
    return cfg
