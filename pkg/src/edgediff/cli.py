"""Command-line interface: ``edgediff compare | sweep | csf-dump | synth``.

Exit status is 0 on success, 1 for bad input (arguments, files, config) and
2 for internal failures.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import KEYS, apply_overrides, load_config
from .harness import CONTRAST_SWEEP, DESATURATION_SWEEP, REPORT_FIELDS, SweepSpec, run_sweep
from .image_io import load_image, save_image, save_map
from .pipeline import Model, PipelineConfig, run_model
from .scenes import make_scenes

log = logging.getLogger("edgediff")

EXIT_INPUT = 1
EXIT_INTERNAL = 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_config_args(p):
    p.add_argument("--config", type=Path, help="INI configuration file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help=f"override any configuration key ({', '.join(KEYS)})")
    p.add_argument("--ppd", type=float, help="pixels per degree of visual angle")
    p.add_argument("--max-luminance", type=float, help="display peak in cd/m^2")
    p.add_argument("--bins", type=int, help="range bins of the edge-aware filters")
    p.add_argument("--range-fraction", type=float, help="sigma_r as a fraction of the guide range")
    p.add_argument("--white-sigma", type=float, help="white-point blur sigma in pixels")
    p.add_argument("--ucs", choices=["IPT", "OKLAB"])
    p.add_argument("--cat", dest="cat_variant", choices=["VonKries_HPE", "CAT02", "CAT16"])
    p.add_argument("--workers", type=int, help="threads for per-bin filtering")
    p.add_argument("--pooling-exponent", type=float)


def _add_model_args(p, default_model=None):
    p.add_argument("--model", default=default_model,
                   choices=[m.value for m in Model] + ["all"],
                   help="model to run (default: from the configuration)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--edge-aware", action="store_true", help="edge-aware variant only")
    g.add_argument("--baseline", action="store_true", help="baseline variant only")
    g.add_argument("--both", action="store_true", help="baseline and edge-aware variants")


def _base_config(args) -> PipelineConfig:
    cfg = load_config(args.config)
    values = {}
    for key in ("ppd", "max_luminance", "bins", "range_fraction", "white_sigma", "ucs",
                "cat_variant", "workers", "pooling_exponent"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = str(v)
    for item in args.overrides:
        if "=" not in item:
            raise InputError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        values[k] = v
    return apply_overrides(cfg, values)


def _configs(args, base: PipelineConfig, default_both: bool = False) -> list[PipelineConfig]:
    """Model/variant list from the flags; without flags the config decides."""
    if args.model is None:
        models = [base.model]
    else:
        models = list(Model) if args.model == "all" else [Model(args.model)]
    if args.both or (default_both and not (args.edge_aware or args.baseline)):
        flags = (False, True)
    elif args.edge_aware or args.baseline:
        flags = (args.edge_aware,)
    else:
        flags = (None,)
    out = []
    for m in models:
        for ea in flags:
            if ea is None and m == base.model:
                out.append(base)
                continue
            ea = bool(ea) if ea is not None else base.edge_aware
            out.append(replace(base, model=m, edge_aware_whitepoint=ea and m != Model.IDIFF,
                               edge_aware_csf=ea and m != Model.ICAM02))
    return out


def cmd_compare(args) -> int:
    base = _base_config(args)
    scale = args.luminance_scale if args.luminance_scale is not None else base.viewing.max_luminance
    ref = load_image(args.ref, luminance_scale=scale)
    test = load_image(args.test, luminance_scale=scale)
    if ref.data.shape != test.data.shape:
        raise InputError(f"image sizes differ: {ref.data.shape[:2]} vs {test.data.shape[:2]}")
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(REPORT_FIELDS)
    rows, results = [], {}
    for cfg in _configs(args, base):
        res = run_model(ref, test, cfg)
        label = f"{cfg.model.value} {cfg.variant_name}"
        results[label] = res
        row = [Path(args.test).stem, cfg.model.value, cfg.variant_name, "", "",
               repr(res.agg_e), repr(res.agg_i), repr(res.agg_c), repr(res.agg_h), ""]
        rows.append(row)
        writer.writerow(row)
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "report.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(REPORT_FIELDS)
            w.writerows(rows)
        for label, res in results.items():
            stem = label.replace(" ", "_").lower()
            for name, m in res.maps.items():
                save_map(m, out / f"{stem}_{name}.png")
        if not args.no_figures:
            from .plotting import plot_difference_maps

            plot_difference_maps(results, out / "maps.png", reference=_display(ref, base),
                                 test=_display(test, base))
    return 0


def _display(img, cfg):
    from .color import TristimulusImage

    return TristimulusImage(img.absolute() / cfg.viewing.max_luminance)


def _load_scenes(args) -> dict:
    if args.synthetic:
        return make_scenes(args.size)
    if args.scenes is None:
        raise InputError("give --scenes DIR or --synthetic")
    folder = Path(args.scenes)
    if not folder.is_dir():
        raise InputError(f"not a directory: {folder}")
    files = sorted(p for p in folder.iterdir() if p.suffix.lower() in (".pfm", ".hdr", ".pic"))
    if not files:
        raise InputError(f"no .pfm or .hdr scenes in {folder}")
    return {p.stem: load_image(p, luminance_scale=args.luminance_scale or 1.0) for p in files}


def cmd_sweep(args) -> int:
    base = _base_config(args)
    preset = {"contrast": CONTRAST_SWEEP, "desaturation": DESATURATION_SWEEP}[args.param]
    tmo = {"durand": "Durand", "reinhard": "Reinhard"}[args.tmo]
    values = tuple(args.values) if args.values else preset.values
    reference = args.reference if args.reference is not None else preset.reference_value
    sweep = SweepSpec(tmo, preset.parameter, values, reference,
                      display_max=base.viewing.max_luminance, fixed=args.fixed)
    scenes = _load_scenes(args)
    report = run_sweep(scenes, sweep, _configs(args, base, default_both=True), out_dir=args.out)
    sys.stdout.write(report.to_csv())
    if args.out is not None and not args.no_figures:
        from .plotting import plot_sweep

        plot_sweep(report, Path(args.out) / "sweep.png")
    failed = [r for r in report.rows if r.error]
    if failed:
        log.error("%d sweep cells failed", len(failed))
        return EXIT_INTERNAL
    return 0


def cmd_csf_dump(args) -> int:
    cfg = _base_config(args)
    f_max = args.fmax if args.fmax is not None else cfg.viewing.ppd / 2.0
    f = np.linspace(0.0, f_max, args.n)
    curves = {name: m.evaluate(f) for name, m in zip(("A", "C1", "C2"), cfg.csf_models)}
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["f", *curves])
    for i, fi in enumerate(f):
        writer.writerow([repr(float(fi)), *(repr(float(c[i])) for c in curves.values())])
    if args.plot is not None:
        from .plotting import plot_csf

        plot_csf(f, curves, args.plot)
    return 0


def cmd_synth(args) -> int:
    out = Path(args.dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, img in make_scenes(args.size).items():
        path = out / f"{name}.{args.format}"
        save_image(img, path)
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="edgediff", description="Edge-aware image appearance and difference models")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compare", help="difference maps and pooled scores for an image pair")
    c.add_argument("ref", type=Path)
    c.add_argument("test", type=Path)
    _add_model_args(c)
    _add_config_args(c)
    c.add_argument("--luminance-scale", type=float,
                   help="cd/m^2 per stored unit (default: the display peak)")
    c.add_argument("--out", type=Path, help="directory for report, maps and figure")
    c.add_argument("--no-figures", action="store_true")
    c.set_defaults(func=cmd_compare)

    s = sub.add_parser("sweep", help="tone-mapping distortion sweep over HDR scenes")
    s.add_argument("--scenes", type=Path, help="directory of .pfm / .hdr scenes")
    s.add_argument("--synthetic", action="store_true", help="use the built-in procedural scenes")
    s.add_argument("--size", type=int, default=256, help="size of the synthetic scenes")
    s.add_argument("--tmo", choices=["durand", "reinhard"], required=True)
    s.add_argument("--param", choices=["contrast", "desaturation"], required=True)
    s.add_argument("--values", type=float, nargs="+")
    s.add_argument("--reference", type=float)
    s.add_argument("--fixed", type=float,
                   help="value of the parameter that is not swept (crossed TMO pairings)")
    s.add_argument("--luminance-scale", type=float, help="cd/m^2 per stored unit (default 1)")
    _add_model_args(s, default_model="all")
    _add_config_args(s)
    s.add_argument("--out", type=Path)
    s.add_argument("--no-figures", action="store_true")
    s.set_defaults(func=cmd_sweep)

    d = sub.add_parser("csf-dump", help="sampled CSF curves as delimited text")
    _add_config_args(d)
    d.add_argument("--fmax", type=float, help="highest frequency (default ppd / 2)")
    d.add_argument("-n", type=int, default=256)
    d.add_argument("--plot", type=Path, help="also render the curves to an image file")
    d.set_defaults(func=cmd_csf_dump)

    y = sub.add_parser("synth", help="write the procedural HDR scenes")
    y.add_argument("dir", type=Path)
    y.add_argument("--size", type=int, default=256)
    y.add_argument("--format", choices=["pfm", "hdr"], default="pfm")
    y.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, ValueError, OSError) as exc:
        print(f"edgediff: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:
        log.exception("internal failure")
        print(f"edgediff: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
