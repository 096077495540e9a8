"""Run configuration: strict JSON parsing with unknown-key rejection.

The parsed configuration is returned together with a fully resolved echo
(defaults filled in, delta shortcuts expanded) that is embedded in the
report and content-hashed for caching.
"""

import hashlib
import json
import math
from dataclasses import dataclass

from .adjustment import DEFAULT_N_VAR, BetaPrior, GammaPrior, PriorSpec
from .calibration import DEFAULT_N_SOB, TestSpec
from .errors import ConfigurationError
from .families import FAMILIES, CharacteristicSpec, DesignSpec

__all__ = ["RunConfig", "parse_config", "load_config", "config_hash"]

DEFAULT_ORACLE_REPS = 500
DEFAULT_ORACLE_M = 10_000


@dataclass(frozen=True)
class RunConfig:
    design: DesignSpec
    priors: PriorSpec
    test: TestSpec
    n_sob: int
    n_var: int
    seed: int
    oracle_reps: int
    oracle_m: int
    echo: dict  # fully resolved configuration as plain JSON data


def _require_keys(obj, allowed, required, path):
    if not isinstance(obj, dict):
        raise ConfigurationError(f"{path} must be an object", field=path)
    for key in obj:
        if key not in allowed:
            raise ConfigurationError(f"unknown key {path}.{key}", field=f"{path}.{key}")
    for key in required:
        if key not in obj:
            raise ConfigurationError(f"missing key {path}.{key}", field=f"{path}.{key}")


def _number(obj, key, path, allow_inf=False):
    v = obj[key]
    if isinstance(v, str) and allow_inf:
        if v in ("inf", "+inf", "Infinity"):
            return math.inf
        if v in ("-inf", "-Infinity"):
            return -math.inf
        raise ConfigurationError(
            f"{path}.{key} must be a number or 'inf'/'-inf'", field=f"{path}.{key}"
        )
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigurationError(f"{path}.{key} must be a number", field=f"{path}.{key}")
    return float(v)


def _integer(obj, key, path, default=None, minimum=None):
    if key not in obj:
        return default
    v = obj[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigurationError(f"{path}.{key} must be an integer", field=f"{path}.{key}")
    if minimum is not None and v < minimum:
        raise ConfigurationError(
            f"{path}.{key} must be >= {minimum}", field=f"{path}.{key}"
        )
    return v


def _parse_characteristic(obj):
    _require_keys(
        obj,
        allowed={"kind", "comparison", "threshold", "index"},
        required={"kind", "comparison"},
        path="design.characteristic",
    )
    threshold = (
        _number(obj, "threshold", "design.characteristic") if "threshold" in obj else None
    )
    index = _integer(obj, "index", "design.characteristic")
    return CharacteristicSpec(
        kind=obj["kind"], comparison=obj["comparison"], threshold=threshold, index=index
    )


def _parse_design(obj):
    _require_keys(
        obj,
        allowed={"family", "eta1", "eta2", "characteristic", "q"},
        required={"family", "eta1", "eta2", "characteristic"},
        path="design",
    )
    family_name = obj["family"]
    if family_name not in FAMILIES:
        raise ConfigurationError(
            f"unknown family {family_name!r}; supported: {sorted(FAMILIES)}",
            field="design.family",
        )
    family = FAMILIES[family_name]
    for key in ("eta1", "eta2"):
        if not isinstance(obj[key], list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj[key]
        ):
            raise ConfigurationError(
                f"design.{key} must be a list of numbers", field=f"design.{key}"
            )
    q = _number(obj, "q", "design") if "q" in obj else 1.0
    return DesignSpec(
        family=family,
        eta1=tuple(obj["eta1"]),
        eta2=tuple(obj["eta2"]),
        characteristic=_parse_characteristic(obj["characteristic"]),
        q=q,
    )


def _parse_component_prior(obj, path):
    _require_keys(
        obj, allowed={"dist", "shape", "rate", "a", "b"}, required={"dist"}, path=path
    )
    if obj["dist"] == "gamma":
        _require_keys(obj, {"dist", "shape", "rate"}, {"shape", "rate"}, path)
        return GammaPrior(shape=_number(obj, "shape", path), rate=_number(obj, "rate", path))
    if obj["dist"] == "beta":
        _require_keys(obj, {"dist", "a", "b"}, {"a", "b"}, path)
        return BetaPrior(a=_number(obj, "a", path), b=_number(obj, "b", path))
    raise ConfigurationError(
        f"unknown prior dist {obj['dist']!r}; supported: gamma, beta",
        field=f"{path}.dist",
    )


def _parse_priors(obj):
    _require_keys(obj, {"group1", "group2"}, {"group1", "group2"}, "priors")
    groups = []
    for name in ("group1", "group2"):
        comps = obj[name]
        if not isinstance(comps, list) or not comps:
            raise ConfigurationError(
                f"priors.{name} must be a nonempty list", field=f"priors.{name}"
            )
        groups.append(
            tuple(
                _parse_component_prior(c, f"priors.{name}[{i}]")
                for i, c in enumerate(comps)
            )
        )
    return PriorSpec(group1=groups[0], group2=groups[1])


def _resolve_deltas(obj, comparison):
    has_star = "delta_star" in obj
    has_explicit = "delta1" in obj or "delta2" in obj
    if has_star and has_explicit:
        raise ConfigurationError(
            "give either test.delta_star or test.delta1/delta2, not both",
            field="test.delta_star",
        )
    if has_star:
        ds = _number(obj, "delta_star", "test")
        if ds <= 0.0:
            raise ConfigurationError("test.delta_star must be positive", field="test.delta_star")
        if comparison == "difference":
            return -ds, ds
        if comparison == "ratio":
            return 1.0 / (1.0 + ds), 1.0 + ds
        return -math.log1p(ds), math.log1p(ds)
    if "delta1" not in obj or "delta2" not in obj:
        raise ConfigurationError(
            "test requires delta_star or both delta1 and delta2", field="test"
        )
    return (
        _number(obj, "delta1", "test", allow_inf=True),
        _number(obj, "delta2", "test", allow_inf=True),
    )


def _parse_test(obj, comparison):
    _require_keys(
        obj,
        allowed={
            "mode",
            "gamma",
            "target_power",
            "delta_star",
            "delta1",
            "delta2",
            "l",
            "alpha",
        },
        required=set(),
        path="test",
    )
    mode = obj.get("mode", "calibrated")
    delta1, delta2 = _resolve_deltas(obj, comparison)
    gamma = _number(obj, "gamma", "test") if "gamma" in obj else None
    target_power = _number(obj, "target_power", "test") if "target_power" in obj else None
    if mode == "explicit":
        return TestSpec.explicit(
            delta1,
            delta2,
            l=_number(obj, "l", "test") if "l" in obj else None,
            alpha=_number(obj, "alpha", "test") if "alpha" in obj else None,
            gamma=gamma,
            target_power=target_power,
        )
    if mode != "calibrated":
        raise ConfigurationError(
            f"test.mode must be 'calibrated' or 'explicit', got {mode!r}",
            field="test.mode",
        )
    return TestSpec.calibrated(delta1, delta2, gamma=gamma, target_power=target_power)


def _prior_echo(comp):
    if isinstance(comp, GammaPrior):
        return {"dist": "gamma", "shape": comp.shape, "rate": comp.rate}
    return {"dist": "beta", "a": comp.a, "b": comp.b}


def _json_num(v):
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return v


def parse_config(raw):
    """Validate a raw configuration dict into a RunConfig."""
    _require_keys(
        raw,
        allowed={"design", "priors", "test", "n_sob", "n_var", "seed", "oracle"},
        required={"design", "priors", "test"},
        path="config",
    )
    design = _parse_design(raw["design"])
    priors = _parse_priors(raw["priors"])
    priors.validate_for_design(design)
    test = _parse_test(raw["test"], design.characteristic.comparison)
    n_sob = _integer(raw, "n_sob", "config", default=DEFAULT_N_SOB, minimum=2)
    n_var = _integer(raw, "n_var", "config", default=DEFAULT_N_VAR, minimum=2)
    seed = _integer(raw, "seed", "config", default=0, minimum=0)
    oracle = raw.get("oracle", {})
    _require_keys(oracle, {"reps", "m"}, set(), "oracle")
    reps = _integer(oracle, "reps", "oracle", default=DEFAULT_ORACLE_REPS, minimum=1)
    m = _integer(oracle, "m", "oracle", default=DEFAULT_ORACLE_M, minimum=1000)

    char = design.characteristic
    echo = {
        "design": {
            "family": design.family.kind,
            "eta1": list(design.eta1),
            "eta2": list(design.eta2),
            "characteristic": {
                "kind": char.kind,
                "comparison": char.comparison,
                **({"threshold": char.threshold} if char.threshold is not None else {}),
                **({"index": char.index} if char.index is not None else {}),
            },
            "q": design.q,
        },
        "priors": {
            "group1": [_prior_echo(c) for c in priors.group1],
            "group2": [_prior_echo(c) for c in priors.group2],
        },
        "test": {
            "mode": test.mode,
            "delta1": _json_num(test.delta1),
            "delta2": _json_num(test.delta2),
            **({"gamma": test.gamma} if test.gamma is not None else {}),
            **(
                {"target_power": test.target_power}
                if test.target_power is not None
                else {}
            ),
            **({"l": test.l} if test.l is not None else {}),
            **({"alpha": test.alpha} if test.alpha is not None else {}),
        },
        "n_sob": n_sob,
        "n_var": n_var,
        "seed": seed,
        "oracle": {"reps": reps, "m": m},
    }
    return RunConfig(
        design=design,
        priors=priors,
        test=test,
        n_sob=n_sob,
        n_var=n_var,
        seed=seed,
        oracle_reps=reps,
        oracle_m=m,
        echo=echo,
    )


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw)


def config_hash(echo):
    """Content hash of the resolved configuration (cache key)."""
    canonical = json.dumps(echo, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
