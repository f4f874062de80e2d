"""
Tone-mapping distortion sweeps and experiment reports.

A sweep renders every scene through one tone-mapping operator at several
parameter values, compares each rendering against the one at the reference
value with every model configuration, and collects pooled scores.
"""

from __future__ import annotations

import csv
import enum
import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .color import TristimulusImage
from .image_io import save_map
from .pipeline import PipelineConfig, appearance, compare_appearances
from .tonemap import tonemap_durand, tonemap_reinhard

log = logging.getLogger(__name__)

REPORT_FIELDS = ["scene", "model", "variant", "parameter", "value",
                 "agg_e", "agg_i", "agg_c", "agg_h", "error"]


class Tmo(str, enum.Enum):
    DURAND = "Durand"
    REINHARD = "Reinhard"


class Parameter(str, enum.Enum):
    BASE_CONTRAST = "BaseContrast"
    DESATURATION = "Desaturation"


# value held by the parameter that is not swept
_FIXED_DEFAULT = {Parameter.BASE_CONTRAST: 0.0, Parameter.DESATURATION: 1000.0}


@dataclass(frozen=True)
class SweepSpec:
    """One TMO swept over one parameter.

    The native pairings are Durand/BaseContrast and Reinhard/Desaturation; the
    crossed pairings also run, with the other parameter held at ``fixed``
    (default: no desaturation, or a base contrast of 1000; for Reinhard a base
    contrast of ``None`` means no pre-compression).
    """

    tmo: Tmo
    parameter: Parameter
    values: tuple
    reference_value: float
    display_max: float = 100.0
    fixed: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "tmo", Tmo(self.tmo))
        object.__setattr__(self, "parameter", Parameter(self.parameter))
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("a sweep needs at least one value")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        object.__setattr__(self, "values", values)
        if self.fixed is None and not (self.tmo == Tmo.REINHARD
                                       and self.parameter == Parameter.DESATURATION):
            object.__setattr__(self, "fixed", _FIXED_DEFAULT[self.parameter])
        # render once so bad parameter values fail before any work
        probe = TristimulusImage(np.ones((2, 2, 3)))
        for v in (*values, self.reference_value):
            self.render(probe, v)

    def render(self, scene: TristimulusImage, value: float) -> TristimulusImage:
        if self.parameter == Parameter.BASE_CONTRAST:
            contrast, desat = value, self.fixed
        else:
            contrast, desat = self.fixed, value
        if self.tmo == Tmo.DURAND:
            return tonemap_durand(scene, contrast, display_max=self.display_max, desaturation=desat)
        return tonemap_reinhard(scene, desat, display_max=self.display_max, base_contrast=contrast)


CONTRAST_SWEEP = SweepSpec(Tmo.DURAND, Parameter.BASE_CONTRAST, (10, 100, 1000, 10000), 1000)
DESATURATION_SWEEP = SweepSpec(Tmo.REINHARD, Parameter.DESATURATION, (0.0, 0.25, 0.5, 0.75), 0.0)


@dataclass
class ReportRow:
    scene: str
    model: str
    variant: str
    parameter: str
    value: float
    agg_e: float = math.nan
    agg_i: float = math.nan
    agg_c: float = math.nan
    agg_h: float = math.nan
    error: str = ""
    maps: dict = field(default_factory=dict, repr=False)


@dataclass
class ExperimentReport:
    sweep: SweepSpec
    rows: list[ReportRow] = field(default_factory=list)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_FIELDS)
        for r in self.rows:
            writer.writerow([r.scene, r.model, r.variant, r.parameter, repr(r.value),
                             repr(r.agg_e), repr(r.agg_i), repr(r.agg_c), repr(r.agg_h), r.error])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    def series(self, model: str, variant: str, scene: Optional[str] = None,
               metric: str = "agg_e") -> tuple[np.ndarray, np.ndarray]:
        """Parameter values and the metric, averaged over scenes unless one is named."""
        xs, ys = [], []
        for v in self.sweep.values:
            cells = [getattr(r, metric) for r in self.rows
                     if r.model == model and r.variant == variant and r.value == v
                     and (scene is None or r.scene == scene)]
            xs.append(v)
            ys.append(float(np.mean(cells)) if cells else math.nan)
        return np.array(xs), np.array(ys)

    @property
    def scenes(self) -> list[str]:
        return list(dict.fromkeys(r.scene for r in self.rows))

    @property
    def configs(self) -> list[tuple[str, str]]:
        return list(dict.fromkeys((r.model, r.variant) for r in self.rows))

    def write_curves(self, out_dir) -> list[Path]:
        """One delimited file per model/variant: value, mean agg_e, then one column per scene."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = []
        for model, variant in self.configs:
            path = out_dir / f"curve_{model}_{variant}.csv".lower()
            xs, mean = self.series(model, variant)
            per_scene = [self.series(model, variant, s)[1] for s in self.scenes]
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["value", "mean_agg_e", *self.scenes])
                for i, x in enumerate(xs):
                    w.writerow([repr(float(x)), repr(float(mean[i])),
                                *(repr(float(p[i])) for p in per_scene)])
            paths.append(path)
        return paths


def _config_label(cfg: PipelineConfig) -> tuple[str, str]:
    return cfg.model.value, cfg.variant_name


def run_sweep(scenes: Mapping[str, TristimulusImage] | Sequence[TristimulusImage],
              sweep: SweepSpec, configs: Sequence[PipelineConfig],
              out_dir=None, keep_maps: bool = False) -> ExperimentReport:
    """Render, compare and pool every (scene, value, config) cell.

    A failing cell is recorded with its error message and NaN scores; the
    rest of the sweep continues. With ``out_dir`` the report, sweep curves and
    per-cell delta-E maps (16-bit PNG plus range sidecar) are written there.
    """
    if not isinstance(scenes, Mapping):
        scenes = {f"scene{i}": s for i, s in enumerate(scenes)}
    if not scenes:
        raise ValueError("no scenes to sweep")
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        (out / "maps").mkdir(parents=True, exist_ok=True)
    report = ExperimentReport(sweep)
    pname = sweep.parameter.value
    for name, scene in scenes.items():
        renders: dict[float, TristimulusImage] = {}

        def render(v):
            if v not in renders:
                renders[v] = sweep.render(scene, v)
            return renders[v]

        for cfg in configs:
            model, variant = _config_label(cfg)
            try:
                ref_app = appearance(render(sweep.reference_value), cfg)
            except Exception as exc:  # recorded per cell, the sweep goes on
                log.exception("reference failed for %s %s %s", name, model, variant)
                for v in sweep.values:
                    report.rows.append(ReportRow(name, model, variant, pname, v, error=repr(exc)))
                continue
            for v in sweep.values:
                row = ReportRow(name, model, variant, pname, v)
                try:
                    test_app = ref_app if v == sweep.reference_value else appearance(render(v), cfg)
                    res = compare_appearances(test_app, ref_app, cfg)
                    row.agg_e, row.agg_i, row.agg_c, row.agg_h = (
                        res.agg_e, res.agg_i, res.agg_c, res.agg_h)
                    if keep_maps:
                        row.maps = res.maps
                    if out is not None:
                        stem = f"{name}_{model}_{variant}_{pname}_{v:g}".lower()
                        save_map(res.delta_e, out / "maps" / f"{stem}_delta_e.png")
                except Exception as exc:
                    log.exception("cell failed: %s %s %s %s=%g", name, model, variant, pname, v)
                    row.error = repr(exc)
                report.rows.append(row)
    if out is not None:
        report.to_csv(out / "report.csv")
        report.write_curves(out)
    return report
