"""Key-value configuration files (INI) for :class:`PipelineConfig`."""

from __future__ import annotations

import configparser
from dataclasses import fields, replace
from importlib import resources
from typing import Mapping

from .color import WhitePoint
from .csf import ChromaticLowpass, CsfModel, Movshon
from .pipeline import PipelineConfig, PipelineError, ViewingConditions


class ConfigError(PipelineError):
    pass


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _opt_float(text: str):
    text = text.strip()
    return None if text in ("", "none", "auto") else float(text)


def _floats(text: str, n: int) -> list[float]:
    vals = [float(v) for v in text.replace(",", " ").split()]
    if len(vals) != n:
        raise ConfigError(f"expected {n} numbers, got {text!r}")
    return vals


_PIPELINE_KEYS = {
    "model": str, "cat_variant": str, "ucs": str,
    "edge_aware_whitepoint": _bool, "edge_aware_csf": _bool, "csf_enabled": _bool,
    "oblique": _bool, "edge_enhancement": _bool, "edge_enhance_chroma": _bool,
    "local_contrast": _bool, "rescale_fl": _bool,
    "degree": float, "range_fraction": float, "epsilon": float, "white_floor": float,
    "pooling_exponent": float, "bins": int, "workers": int,
    "white_sigma": _opt_float, "contrast_sigma": _opt_float,
}
_VIEWING_KEYS = {"ppd", "max_luminance", "reference_white"}
_CSF_KEYS = {"movshon_a", "movshon_b", "movshon_c", "flatten_achromatic", "nss", "rg", "by"}

KEYS = sorted(set(_PIPELINE_KEYS) | _VIEWING_KEYS | _CSF_KEYS)


def _csf_state(cfg: PipelineConfig) -> dict:
    a, rg, by = cfg.csf_models
    return {"movshon": a.kind, "flatten": a.flatten, "nss": a.nss, "rg": rg.kind, "by": by.kind}


def apply_overrides(cfg: PipelineConfig, values: Mapping[str, str]) -> PipelineConfig:
    """Apply string-valued settings (file entries or --set pairs) to a config."""
    changes, viewing = {}, {}
    csf = _csf_state(cfg)
    for key, text in values.items():
        key = key.strip().lower()
        if key in _PIPELINE_KEYS:
            changes[key] = _PIPELINE_KEYS[key](text)
        elif key in ("ppd", "max_luminance"):
            viewing[key] = float(text)
        elif key == "reference_white":
            viewing[key] = WhitePoint(*_floats(text, 3))
        elif key.startswith("movshon_"):
            m = csf["movshon"]
            params = {"a": m.a, "b": m.b, "c": m.c}
            params[key[-1]] = float(text)
            csf["movshon"] = Movshon(**params)
        elif key == "flatten_achromatic":
            csf["flatten"] = _bool(text)
        elif key == "nss":
            csf["nss"] = _bool(text)
        elif key in ("rg", "by"):
            csf[key] = ChromaticLowpass(*_floats(text, 6))
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    if viewing:
        changes["viewing"] = replace(cfg.viewing, **viewing)
    changes["csf_models"] = (
        CsfModel(csf["movshon"], flatten=csf["flatten"], nss=csf["nss"]),
        CsfModel(csf["rg"]),
        CsfModel(csf["by"]),
    )
    try:
        return replace(cfg, **changes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _read(parser: configparser.ConfigParser) -> dict[str, str]:
    out = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            out[key] = value
    return out


def parse_config(text: str, base: PipelineConfig | None = None) -> PipelineConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read_string(text)
    return apply_overrides(base or PipelineConfig(), _read(parser))


def load_config(path=None) -> PipelineConfig:
    """Read a config file on top of the packaged defaults."""
    default = resources.files("edgediff").joinpath("data/default.ini").read_text()
    cfg = parse_config(default)
    if path is not None:
        with open(path) as fh:
            cfg = parse_config(fh.read(), cfg)
    return cfg


def dump_config(cfg: PipelineConfig) -> str:
    """Serialise a config back to INI text."""
    lines = ["[pipeline]"]
    for f in fields(cfg):
        if f.name in _PIPELINE_KEYS:
            v = getattr(cfg, f.name)
            v = getattr(v, "value", v)
            lines.append(f"{f.name} = {'' if v is None else str(v).lower() if isinstance(v, bool) else v}")
    w = cfg.viewing.reference_white
    lines += ["", "[viewing]", f"ppd = {cfg.viewing.ppd}", f"max_luminance = {cfg.viewing.max_luminance}",
              f"reference_white = {w.X} {w.Y} {w.Z}"]
    a, rg, by = cfg.csf_models
    lines += ["", "[csf]", f"movshon_a = {a.kind.a}", f"movshon_b = {a.kind.b}",
              f"movshon_c = {a.kind.c}", f"flatten_achromatic = {str(a.flatten).lower()}",
              f"nss = {str(a.nss).lower()}",
              "rg = " + " ".join(str(getattr(rg.kind, k)) for k in ("a1", "b1", "c1", "a2", "b2", "c2")),
              "by = " + " ".join(str(getattr(by.kind, k)) for k in ("a1", "b1", "c1", "a2", "b2", "c2"))]
    return "\n".join(lines) + "\n"
