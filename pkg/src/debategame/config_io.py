"""JSON game-instance documents.

Top-level keys: ``q_I``, ``prior``, ``shock``, ``csf`` and optionally
``numerics`` and ``off_path``. Errors carry a dotted path into the document
(and line/column for syntax errors).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, fields
from pathlib import Path

from .errors import ConfigError
from .model import (
    CONTINUOUS_FAMILIES,
    ContestSuccess,
    ContinuousPrior,
    DiscretePrior,
    GameConfig,
    NumericSettings,
    OffPathBeliefPolicy,
    ShockDistribution,
)

# Discrete masses are renormalized only if they already sum to 1 within this.
MASS_SUM_GUARD = 1e-6
TOP_LEVEL_KEYS = {"q_I", "prior", "shock", "csf", "numerics", "off_path"}


def _prefixed(exc: ConfigError, prefix: str) -> ConfigError:
    path = f"{prefix}.{exc.path}" if exc.path else prefix
    return ConfigError(exc.message, path)


def _section(doc, key):
    if key not in doc:
        raise ConfigError("missing required key", key)
    value = doc[key]
    if not isinstance(value, dict):
        raise ConfigError("expected an object", key)
    return value


def parse_prior(spec: dict, numerics: NumericSettings, path: str = "prior"):
    family = spec.get("family")
    if family == "discrete":
        points = spec.get("points")
        if not isinstance(points, list) or not points:
            raise ConfigError("expected a non-empty list of [quality, mass] pairs", f"{path}.points")
        qs, ms = [], []
        for i, pair in enumerate(points):
            if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
                raise ConfigError("expected a [quality, mass] pair", f"{path}.points[{i}]")
            for j, value in enumerate(pair):
                if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                    raise ConfigError(f"expected a finite number, got {value!r}", f"{path}.points[{i}][{j}]")
            if pair[0] < 0:
                raise ConfigError("quality must be nonnegative", f"{path}.points[{i}][0]")
            if pair[1] <= 0:
                raise ConfigError("mass must be positive", f"{path}.points[{i}][1]")
            qs.append(float(pair[0]))
            ms.append(float(pair[1]))
        total = sum(ms)
        if abs(total - 1.0) > MASS_SUM_GUARD:
            raise ConfigError(f"masses sum to {total!r}, not 1", f"{path}.points")
        extra = set(spec) - {"family", "points"}
        if extra:
            raise ConfigError("unexpected key", f"{path}.{sorted(extra)[0]}")
        try:
            return DiscretePrior(qs, ms)
        except ConfigError as exc:
            raise _prefixed(exc, path) from None
    if family in CONTINUOUS_FAMILIES:
        extra = set(spec) - {"family", "params", "lower"}
        if extra:
            raise ConfigError("unexpected key", f"{path}.{sorted(extra)[0]}")
        params = spec.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("expected an object", f"{path}.params")
        try:
            return ContinuousPrior(family, params, lower=float(spec.get("lower", 0.0)),
                                   truncation_quantile=numerics.truncation_quantile)
        except ConfigError as exc:
            raise _prefixed(exc, path) from None
    raise ConfigError(f"unknown prior family {family!r}", f"{path}.family")


def _family_object(cls, spec: dict, path: str):
    extra = set(spec) - {"family", "params"}
    if extra:
        raise ConfigError("unexpected key", f"{path}.{sorted(extra)[0]}")
    params = spec.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("expected an object", f"{path}.params")
    try:
        return cls(spec.get("family"), params)
    except ConfigError as exc:
        raise _prefixed(exc, path) from None


def config_from_dict(doc: dict, check_csf: bool = True) -> GameConfig:
    """Build a GameConfig from a parsed document.

    With ``check_csf`` the contest success function must also pass
    :func:`~debategame.model.validate_csf` at the document's ``q_I``.
    """
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a JSON object")
    extra = set(doc) - TOP_LEVEL_KEYS
    if extra:
        raise ConfigError("unexpected key", sorted(extra)[0])

    numerics_doc = doc.get("numerics", {})
    if not isinstance(numerics_doc, dict):
        raise ConfigError("expected an object", "numerics")
    known = {f.name for f in fields(NumericSettings)}
    unknown = set(numerics_doc) - known
    if unknown:
        raise ConfigError("unknown setting", f"numerics.{sorted(unknown)[0]}")
    try:
        numerics = NumericSettings(**numerics_doc)
    except ConfigError as exc:
        raise _prefixed(exc, "numerics") from None
    except TypeError as exc:
        raise ConfigError(str(exc), "numerics") from None

    if "q_I" not in doc:
        raise ConfigError("missing required key", "q_I")
    prior = parse_prior(_section(doc, "prior"), numerics)
    shock = _family_object(ShockDistribution, _section(doc, "shock"), "shock")
    csf = _family_object(ContestSuccess, _section(doc, "csf"), "csf")

    off_doc = doc.get("off_path", {"rule": "point-mass-at", "value": 0.0})
    if not isinstance(off_doc, dict):
        raise ConfigError("expected an object", "off_path")
    if set(off_doc) - {"rule", "value"}:
        raise ConfigError("unexpected key", f"off_path.{sorted(set(off_doc) - {'rule', 'value'})[0]}")
    try:
        off_path = OffPathBeliefPolicy(off_doc.get("rule", "point-mass-at"), off_doc.get("value"))
    except ConfigError as exc:
        raise _prefixed(exc, "off_path") from None

    if isinstance(doc["q_I"], bool):
        raise ConfigError("expected a number", "q_I")
    config = GameConfig(doc["q_I"], prior, shock, csf, numerics, off_path)
    if check_csf:
        config.check()
    return config


def load_config(path, check_csf: bool = True) -> GameConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}, column {exc.colno}") from None
    return config_from_dict(doc, check_csf=check_csf)


def config_to_dict(config: GameConfig) -> dict:
    """Normalized echo of a config; ``config_from_dict`` round-trips it."""
    def plain(mapping):
        return {k: (v.tolist() if hasattr(v, "tolist") else v) for k, v in mapping.items()}

    return {
        "q_I": config.q_I,
        "prior": config.prior.to_dict(),
        "shock": {"family": config.shock.family, "params": plain(config.shock.params)},
        "csf": {"family": config.csf.family, "params": plain(config.csf.params)},
        "numerics": asdict(config.numerics),
        "off_path": config.off_path.to_dict(),
    }
