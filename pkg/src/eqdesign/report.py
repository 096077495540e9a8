"""Design reports: building, serialization, and the content-addressed cache.

A report is a single self-describing JSON document.  Numeric fields are
serialized with Python's shortest round-trip float repr, so parsing the
document back recovers every value bit for bit.

Reproducibility contract: reports are cached by the content hash of the
resolved configuration.  A cache hit replays the original bytes
verbatim (including the original run's stage timings), so identical
configurations always produce byte-identical reports.  Reports carry no
wall-clock timestamps for the same reason.
"""

import json
import math
import os
import tempfile
import time

from . import __version__
from .adjustment import stage_two
from .calibration import MODE_CALIBRATED, stage_one
from .curves import INTERPOLATION_CONVENTION
from .config import config_hash, parse_config

__all__ = [
    "REPORT_FORMAT",
    "build_report",
    "report_to_json",
    "execute_design",
    "default_cache_dir",
]

REPORT_FORMAT = "eqdesign-report/v1"

CACHE_ENV_VAR = "EQDESIGN_CACHE_DIR"


def default_cache_dir():
    return os.environ.get(CACHE_ENV_VAR, ".eqdesign-cache")


def _jsonify(value):
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def _knots_payload(knots):
    return [[float(n), float(p)] for n, p in knots]


def _stage_one_payload(s1):
    return {
        "mu_l": s1.mu_l,
        "sigma_l": s1.sigma_l,
        "l": s1.l,
        "alpha": s1.alpha,
        "z": s1.z,
        "inv_fisher_theta": s1.inv_fisher,
        "a_squared": s1.a2,
        "n_sob": s1.n_sob,
        "censored_count": s1.censored_count,
        "classification": s1.classification,
        "seed": s1.seed,
    }


def _stage_two_payload(s2):
    return {
        "mu_tilde": s2.mu_tilde,
        "mu_dot": s2.mu_dot,
        "mu_ddot": s2.mu_ddot,
        "sigma_ddot": s2.sigma_ddot,
        "sigma_eps_hat": s2.sigma_eps_hat,
        "gamma_tilde": s2.gamma_tilde,
        "beta0_hat": s2.beta0_hat,
        "beta1_hat": s2.beta1_hat,
        "mu_hat": s2.mu_hat,
        "sigma_hat": s2.sigma_hat,
        "p_tilde": s2.p_tilde,
        "n_recommended": s2.n_recommended,
        "curve_scale": s2.curve_scale,
        "n_var": s2.n_var,
        "n_failed": s2.n_failed,
        "sub_seeds": list(s2.sub_seeds),
    }


def build_report(echo, s1, s2=None, timings=None):
    """Assemble the report document from engine results."""
    warnings = list(s1.warnings)
    curves = {}
    classification = s1.classification
    sssd = s1.sssd
    if s1.samp_sobol.size:
        curves["f_star"] = _knots_payload(s1.curve.knots())
    if s2 is not None:
        warnings = list(dict.fromkeys(list(s1.warnings) + list(s2.warnings)))
        curves["f_tilde"] = _knots_payload(s2.adjusted_curve.knots())
        classification = s2.classification
        sssd = s2.sssd
    report = {
        "format": REPORT_FORMAT,
        "engine_version": __version__,
        "config": echo,
        "config_hash": config_hash(echo),
        "conventions": {
            "curve_interpolation": INTERPOLATION_CONVENTION,
            "quantile": "same linear interpolation as the power curve",
            "final_rounding": "recommended n is the ceiling of the curve quantile",
        },
        "stage_one": _stage_one_payload(s1),
        "stage_two": _stage_two_payload(s2) if s2 is not None else None,
        "sssd": {
            "mu": sssd.mu_l,
            "sigma": sssd.sigma_l,
            "l": sssd.l,
            "alpha": sssd.alpha,
            "stage": sssd.stage,
            "probable_domain": list(sssd.probable_domain),
        },
        "classification": classification,
        "recommendation": (
            {"n": s2.n_recommended, "p_tilde": s2.p_tilde} if s2 is not None else None
        ),
        "curves": curves,
        "warnings": warnings,
        "timings": timings or {},
    }
    return report


def report_to_json(report):
    return json.dumps(report, indent=2, sort_keys=True, default=_jsonify) + "\n"


def _cache_path(cache_dir, key):
    return os.path.join(cache_dir, f"{key}.json")


def _cache_read(cache_dir, key):
    if cache_dir is None:
        return None
    path = _cache_path(cache_dir, key)
    if os.path.exists(path):
        with open(path, "rb") as fh:
            return fh.read()
    return None


def _cache_write(cache_dir, key, payload):
    if cache_dir is None:
        return
    os.makedirs(cache_dir, exist_ok=True)
    path = _cache_path(cache_dir, key)
    if os.path.exists(path):
        return  # write-once: first writer wins
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def execute_design(raw_config, cache_dir=None):
    """Run the full design pipeline for a raw config dict.

    Returns (payload_bytes, report_dict, from_cache).  Cache hits return
    the stored bytes verbatim.
    """
    cfg = parse_config(raw_config) if not hasattr(raw_config, "echo") else raw_config
    key = config_hash(cfg.echo)
    cached = _cache_read(cache_dir, key)
    if cached is not None:
        return cached, json.loads(cached), True

    timings = {}
    if cfg.test.mode == MODE_CALIBRATED:
        s2 = stage_two(
            cfg.design,
            cfg.priors,
            cfg.test,
            n_sob=cfg.n_sob,
            n_var=cfg.n_var,
            seed=cfg.seed,
            timings=timings,
        )
        s1 = s2.stage1
    else:
        start = time.perf_counter()
        s1 = stage_one(cfg.design, cfg.test, n_sob=cfg.n_sob, seed=cfg.seed)
        timings["stage_one_s"] = time.perf_counter() - start
        s2 = None
    report = build_report(cfg.echo, s1, s2, timings=timings)
    payload = report_to_json(report).encode("utf-8")
    _cache_write(cache_dir, key, payload)
    return payload, report, False
