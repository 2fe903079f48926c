"""Location-level structural parameters and finite populations drawn from a type mix."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from . import _rng
from .errors import ConfigError

PROFILE_FIELDS = ("benefit", "return_beta", "persist_p", "persist_q", "rho", "latent_trait")


@dataclass(frozen=True)
class TraitLaw:
    """Distribution of the latent historical level within one type.

    ``kind`` is ``"uniform"`` (on ``[lo, hi]``) or ``"atoms"`` (``values`` with
    probabilities ``weights``).
    """

    kind: str = "uniform"
    lo: float = 0.0
    hi: float = 1.0
    values: tuple[float, ...] = ()
    weights: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "uniform":
            if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.hi < self.lo:
                raise ConfigError(f"uniform trait law needs finite lo <= hi, got [{self.lo}, {self.hi}]")
        elif self.kind == "atoms":
            if not self.values or len(self.values) != len(self.weights):
                raise ConfigError("atoms trait law needs matching, nonempty values and weights")
            if any(w <= 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-12:
                raise ConfigError("atom weights must be positive and sum to 1")
            if not all(math.isfinite(v) for v in self.values):
                raise ConfigError("atom values must be finite")
        else:
            raise ConfigError(f"unknown trait law kind {self.kind!r}")

    @classmethod
    def atoms(cls, values, weights=None) -> TraitLaw:
        values = tuple(float(v) for v in values)
        if weights is None:
            weights = (1.0 / len(values),) * len(values)
        return cls(kind="atoms", values=values, weights=tuple(float(w) for w in weights))

    def sample(self, u: np.ndarray) -> np.ndarray:
        if self.kind == "uniform":
            return self.lo + u * (self.hi - self.lo)
        edges = np.cumsum(self.weights)
        idx = np.searchsorted(edges, u, side="right")
        return np.asarray(self.values)[np.minimum(idx, len(self.values) - 1)]


@dataclass(frozen=True)
class LocationProfile:
    """Structural parameters of one location type.

    ``persist_p`` is Pr(x_t = 0 | x_hist = 0) and ``persist_q`` is
    Pr(x_t = 1 | x_hist = 1); ``rho`` is the AR coefficient used by continuous
    mechanisms. When ``trait_law`` is set it overrides the point value
    ``latent_trait`` at sampling time.
    """

    benefit: float = 0.0
    return_beta: float = 0.0
    persist_p: float = 1.0
    persist_q: float = 1.0
    rho: float = 1.0
    latent_trait: float = 0.0
    trait_law: TraitLaw | None = None

    def __post_init__(self):
        for name in PROFILE_FIELDS:
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"profile field {name} must be finite")
        for name in ("persist_p", "persist_q"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")


@dataclass(frozen=True)
class TypeMix:
    components: tuple[tuple[float, LocationProfile], ...]

    def __post_init__(self):
        if not self.components:
            raise ConfigError("type mix is empty")
        props = [p for p, _ in self.components]
        if any(not (p > 0) for p in props):
            raise ConfigError("type proportions must be strictly positive")
        if abs(math.fsum(props) - 1.0) > 1e-12:
            raise ConfigError(f"type proportions sum to {math.fsum(props)!r}, not 1")

    @property
    def proportions(self) -> np.ndarray:
        return np.array([p for p, _ in self.components])

    @property
    def profiles(self) -> list[LocationProfile]:
        return [prof for _, prof in self.components]


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Population:
    """Columnar profile arrays for N locations plus their type index."""

    benefit: np.ndarray
    return_beta: np.ndarray
    persist_p: np.ndarray
    persist_q: np.ndarray
    rho: np.ndarray
    latent_trait: np.ndarray
    type_index: np.ndarray = field(default=None)

    def __post_init__(self):
        cols = {f.name: getattr(self, f.name) for f in fields(self)}
        if cols["type_index"] is None:
            cols["type_index"] = np.zeros(len(cols["benefit"]), dtype=np.int64)
        lengths = {len(np.atleast_1d(c)) for c in cols.values()}
        if len(lengths) != 1 or lengths == {0}:
            raise ValueError("population columns must share one length N >= 1")
        for name, col in cols.items():
            dtype = np.int64 if name == "type_index" else np.float64
            col = np.atleast_1d(np.asarray(col, dtype=dtype))
            if name != "type_index" and not np.all(np.isfinite(col)):
                raise ValueError(f"non-finite values in column {name}")
            object.__setattr__(self, name, _readonly(col))
        if np.any((self.persist_p < 0) | (self.persist_p > 1) | (self.persist_q < 0) | (self.persist_q > 1)):
            raise ValueError("persistence probabilities outside [0, 1]")

    def __len__(self) -> int:
        return len(self.benefit)

    @property
    def n(self) -> int:
        return len(self)

    def replace(self, **columns) -> Population:
        cols = {f.name: getattr(self, f.name) for f in fields(self)}
        cols.update(columns)
        return Population(**cols)

    def __eq__(self, other):
        if not isinstance(other, Population):
            return NotImplemented
        return all(np.array_equal(getattr(self, f.name), getattr(other, f.name)) for f in fields(self))

    @classmethod
    def from_profiles(cls, profiles, type_index=None) -> Population:
        """Build from a list of per-location profiles (latent_trait taken as-is)."""
        data = {name: [getattr(p, name) for p in profiles] for name in PROFILE_FIELDS}
        return cls(**data, type_index=type_index)


def sample_population(mix: TypeMix, n: int, seed: int, benefit_noise: float = 0.0) -> Population:
    """Draw ``n`` locations with types i.i.d. from ``mix``.

    ``benefit_noise`` adds a N(0, benefit_noise^2) perturbation to each
    location's benefit, which loosens the link between benefit and return.
    """
    if not isinstance(mix, TypeMix):
        raise TypeError("mix must be a TypeMix")
    if n < 1:
        raise ValueError("n must be at least 1")
    if benefit_noise < 0:
        raise ValueError("benefit_noise must be nonnegative")

    edges = np.cumsum(mix.proportions)
    edges[-1] = 1.0
    types = np.searchsorted(edges, _rng.uniforms(seed, _rng.TYPE, n), side="right")
    types = np.minimum(types, len(edges) - 1)

    profiles = mix.profiles
    cols = {name: np.array([getattr(p, name) for p in profiles], dtype=float)[types] for name in PROFILE_FIELDS}

    u_trait = _rng.uniforms(seed, _rng.TRAIT, n)
    trait = cols["latent_trait"]
    for k, prof in enumerate(profiles):
        if prof.trait_law is not None:
            sel = types == k
            trait[sel] = prof.trait_law.sample(u_trait[sel])

    if benefit_noise > 0:
        cols["benefit"] = cols["benefit"] + benefit_noise * _rng.normals(seed, _rng.BENEFIT, n)

    return Population(**cols, type_index=types)


@dataclass(frozen=True)
class InstrumentRule:
    """How the historical instrument is assigned.

    ``"bernoulli"``: independent draws with Pr(z=1) = share.
    ``"split"``: deterministic, evenly interleaved by location index.
    ``"ternary"``: uniform over {0, 1, 2}.
    """

    kind: str = "bernoulli"
    share: float = 0.5

    def __post_init__(self):
        if self.kind not in ("bernoulli", "split", "ternary"):
            raise ConfigError(f"unknown instrument rule {self.kind!r}")
        if not 0.0 <= self.share <= 1.0:
            raise ConfigError(f"instrument share {self.share} outside [0, 1]")

    @property
    def levels(self) -> tuple[int, ...]:
        return (0, 1, 2) if self.kind == "ternary" else (0, 1)


def assign_instrument(pop: Population, rule: InstrumentRule, seed: int) -> np.ndarray:
    n = len(pop)
    if rule.kind == "split":
        i = np.arange(n + 1)
        steps = np.floor(i * rule.share + 1e-12)
        return np.diff(steps).astype(np.int64)
    u = _rng.uniforms(seed, _rng.INSTRUMENT, n)
    if rule.kind == "ternary":
        return np.minimum((u * 3).astype(np.int64), 2)
    return (u < rule.share).astype(np.int64)
