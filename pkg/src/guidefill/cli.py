"""Command-line surface: inpaint, detection, studies, demos, service.

Exit codes for `inpaint`: 2 dimension mismatch, 3 unreadable input,
4 unfillable domain (outputs are still written for 4).
"""

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import engine, fileio, guide, harness, limits, splines as spline_io, tracker

EXIT_DIMENSION = 2
EXIT_UNREADABLE = 3
EXIT_UNFILLABLE = 4

_KINDS = {"axis": "axis_ball", "rotated": "rotated_ball",
          "axis_ball": "axis_ball", "rotated_ball": "rotated_ball"}


def _parse_mu(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise click.BadParameter(f"mu must be a number or 'inf', got {text!r}")
    if not value >= 0.0:
        raise click.BadParameter("mu must be >= 0")
    return value


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Guidefill: shell-based geometric inpainting with guide fields."""


@main.command("inpaint")
@click.option("--image", "image_path", required=True, help="Input PNG.")
@click.option("--mask", "mask_path", required=True,
              help="PGM label mask (0 readable, 128 bystander, 255 inpaint).")
@click.option("--splines", "splines_path", default=None,
              help="Spline JSON; omitted = auto-detect.")
@click.option("--out", "out_path", default="inpainted.png", show_default=True)
@click.option("--report", "report_path", default=None,
              help="Where to write the fill report JSON.")
@click.option("--preset", type=click.Choice(["guidefill", "coherence_transport",
                                             "telea"]),
              default="guidefill", show_default=True)
@click.option("--r", "radius", type=int, default=None, help="Ball radius.")
@click.option("--mu", default=None, help="Anisotropy; number or 'inf'.")
@click.option("--order", type=click.Choice(["onion", "smart",
                                            "smart_with_data_term"]),
              default=None)
@click.option("--neighborhood", type=click.Choice(sorted(_KINDS)), default=None)
@click.option("--periodic-x", is_flag=True, default=False)
@click.option("--tracked/--untracked", default=True, show_default=True,
              help="Frontier-tracked fill loop vs full-image rescan.")
def cli_inpaint(image_path, mask_path, splines_path, out_path, report_path,
                preset, radius, mu, order, neighborhood, periodic_x, tracked):
    """Fill the masked region of an image."""
    try:
        image = fileio.load_image(image_path)
    except (OSError, ValueError) as exc:
        _fail(EXIT_UNREADABLE, f"cannot read image: {exc}")
    try:
        labels = fileio.load_labels(mask_path)
    except (OSError, ValueError) as exc:
        _fail(EXIT_UNREADABLE, f"cannot read mask: {exc}")
    if labels.shape != image.shape[:2]:
        _fail(EXIT_DIMENSION,
              f"mask is {labels.shape[1]}x{labels.shape[0]} but image is "
              f"{image.shape[1]}x{image.shape[0]}")

    overrides = {}
    if radius is not None:
        overrides["r"] = radius
    if mu is not None:
        overrides["mu"] = _parse_mu(mu)
    if order is not None:
        overrides["order"] = order
    if neighborhood is not None:
        overrides["neighborhood"] = _KINDS[neighborhood]
    if periodic_x:
        overrides["periodic_x"] = True
    ctor = getattr(engine.FillParams, preset)
    params = ctor(**overrides)

    field = None
    if params.g_source == "guide_field":
        if splines_path is not None:
            try:
                doc = Path(splines_path).read_text(encoding="utf-8")
                splines = spline_io.loads(doc)
            except (OSError, ValueError) as exc:
                _fail(EXIT_UNREADABLE, f"cannot read splines: {exc}")
        else:
            splines = guide.detect_splines(image, labels)
        field = guide.build_guide_field(splines, labels)

    if tracked:
        u, metrics = tracker.run_tracked(image, labels, field, params)
        report = metrics.report
        extra = {"tracked": True, "threads_max": metrics.threads_max,
                 "work_total": metrics.work_total}
    else:
        u, report = engine.inpaint(image, labels, field, params)
        extra = {"tracked": False}

    fileio.save_image(out_path, u)
    doc = report.to_dict()
    doc.update(extra)
    doc["params"] = params.to_dict()
    if report_path:
        Path(report_path).write_text(json.dumps(doc, indent=1) + "\n",
                                     encoding="utf-8")
    click.echo(f"filled {report.filled} px in {report.iterations} iterations "
               f"-> {out_path}")
    if report.unfillable:
        _fail(EXIT_UNFILLABLE,
              f"{report.unfillable_count} px unreachable from any readable "
              "pixel (flagged in report)")


@main.group("splines")
def cli_splines():
    """Spline detection and manipulation."""


@cli_splines.command("detect")
@click.option("--image", "image_path", required=True)
@click.option("--mask", "mask_path", required=True)
@click.option("--out", "out_path", default="splines.json", show_default=True)
@click.option("--sigma", type=float, default=guide.DEFAULT_SIGMA, show_default=True)
@click.option("--rho", type=float, default=guide.DEFAULT_RHO, show_default=True)
def cli_detect(image_path, mask_path, out_path, sigma, rho):
    """Detect edge splines around the unknown region."""
    try:
        image = fileio.load_image(image_path)
        labels = fileio.load_labels(mask_path)
    except (OSError, ValueError) as exc:
        _fail(EXIT_UNREADABLE, str(exc))
    if labels.shape != image.shape[:2]:
        _fail(EXIT_DIMENSION, "mask and image dimensions differ")
    splines = guide.detect_splines(image, labels, sigma=sigma, rho=rho)
    Path(out_path).write_text(spline_io.dumps(splines), encoding="utf-8")
    click.echo(f"{len(splines)} spline(s) -> {out_path}")


@main.group("limits")
def cli_limits():
    """Transport-limit oracles."""


@cli_limits.command("curve")
@click.option("--kind", type=click.Choice(sorted(_KINDS)), default="axis")
@click.option("--r", "radius", type=int, default=3, show_default=True)
@click.option("--mu", default="inf", show_default=True)
@click.option("--samples", type=int, default=179, show_default=True)
@click.option("--out", "out_path", default="curve.csv", show_default=True)
def cli_curve(kind, radius, mu, samples, out_path):
    """Tabulate theta -> theta* for a neighborhood kind."""
    theta, theta_star = limits.limit_angle_curve(
        _KINDS[kind], radius, _parse_mu(mu), samples=samples)
    Path(out_path).write_text(limits.curve_to_csv(theta, theta_star),
                              encoding="utf-8")
    click.echo(f"{samples} samples -> {out_path}")


@main.group("bench")
def cli_bench():
    """Performance experiments."""


@cli_bench.command("scale")
@click.option("--tracked/--untracked", default=True, show_default=True)
@click.option("--heights", default="50,70,100,140,200,280,400,500",
              show_default=True, help="Stripe heights; N = 4*h^2.")
@click.option("--out", "out_path", default="scale.csv", show_default=True)
@click.option("--plot", "plot_path", default=None,
              help="Also write a gnuplot script.")
def cli_scale(tracked, heights, out_path, plot_path):
    """Stripe-family complexity study with power-law fits."""
    hs = tuple(int(t) for t in heights.split(","))
    rows = harness.scaling_study(harness.stripe_family(hs), tracked=tracked)
    Path(out_path).write_text(harness.scaling_csv(rows), encoding="utf-8")
    beta = harness.fit_power_law([(r["N"], r["threads_max"]) for r in rows])
    alpha = harness.fit_power_law([(r["N"], r["seconds"]) for r in rows])
    click.echo(f"threads_max ~ {beta.amplitude:.3g} * N^{beta.alpha:.3f} "
               f"(rms {beta.residual:.2e})")
    click.echo(f"seconds     ~ {alpha.amplitude:.3g} * N^{alpha.alpha:.3f} "
               "(informational; hardware-dependent)")
    if plot_path:
        Path(plot_path).write_text(harness.plot_script(out_path),
                                   encoding="utf-8")
    click.echo(f"{len(rows)} runs -> {out_path}")


@main.command("degrade")
@click.option("--resolutions", default="200x100,400x200,800x400",
              show_default=True)
@click.option("--out", "out_path", default="degradation.csv", show_default=True)
def cli_degrade(resolutions, out_path):
    """Cross-section transition widths by depth and resolution."""
    res = []
    for tok in resolutions.split(","):
        w, h = tok.lower().split("x")
        res.append((int(w), int(h)))
    rows = harness.degradation_study(harness.SyntheticProblem(), res)
    Path(out_path).write_text(harness.degradation_csv(rows), encoding="utf-8")
    for r in rows:
        W, H = r["resolution"]
        click.echo(f"{W}x{H} y={r['y']:+.2f}: width {r['width']:.5f}")
    click.echo(f"-> {out_path}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--data-dir", default=None,
              help="Project root; default $GUIDEFILL_DATA_DIR.")
def cli_serve(host, port, data_dir):
    """Run the local HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(data_dir), host=host, port=port, log_level="warning")


def _demo_line_scene(theta_deg, omega, domain, resolution, half_width):
    return harness.SyntheticProblem(
        omega=omega, domain=domain, geometry="line", theta_deg=theta_deg,
        half_width=half_width, colors=(0.0, 1.0), resolution=resolution,
    )


def _line_spline_points(spec, x_start, x_stop):
    """Pixel-coordinate endpoints of the scene's center line segment."""
    x0, x1, y0, y1 = spec.omega
    W, H = spec.resolution
    hx = (x1 - x0) / W
    hy = (y1 - y0) / H
    cx, cy = (x0 + x1) / 2.0, (y0 + y1) / 2.0
    th = math.radians(spec.theta_deg)
    pts = []
    for xc in (x_start, x_stop):
        yc = cy + math.tan(th) * (xc - cx)
        col = (xc - x0) / hx - 0.5
        row = (y1 - yc) / hy - 0.5
        pts.append((col, row))
    return pts


DEMOS = ("short-spline", "shock", "kink")


@main.command("demo")
@click.argument("name", type=click.Choice(DEMOS))
@click.option("--out-dir", "out_dir", default=".", show_default=True)
def cli_demo(name, out_dir):
    """Write a ready-to-run demo scene (image, mask, splines, truth)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    if name == "short-spline":
        spec = _demo_line_scene(12.0, (0.0, 1.5, 0.0, 1.0),
                                (0.5, 1.0, 0.25, 0.75), (240, 160), 0.02)
        image, labels, truth = harness.render_problem(spec)
        th = math.radians(spec.theta_deg)
        direction = (0.98 * math.cos(th), -0.98 * math.sin(th))
        full = spline_io.Spline(
            id="user-0", source="user", direction=direction,
            points=_line_spline_points(spec, 0.45, 1.05),
        )
        short = spline_io.Spline(
            id="user-0", source="user", direction=direction,
            points=_line_spline_points(spec, 0.45, 0.72),
        )
        (out / "splines_full.json").write_text(spline_io.dumps([full]),
                                               encoding="utf-8")
        (out / "splines_short.json").write_text(spline_io.dumps([short]),
                                                encoding="utf-8")
    elif name == "shock":
        spec = harness.SyntheticProblem(
            omega=(0.0, 2.0, 0.0, 1.0), domain=(0.6, 1.4, 0.3, 0.7),
            geometry="step", theta_deg=90.0,
            colors=((0.0, 0.8, 0.2), (0.9, 0.1, 0.1)),
            resolution=(200, 100),
        )
        image, labels, truth = harness.render_problem(spec)
        (out / "splines.json").write_text(spline_io.dumps([]), encoding="utf-8")
    else:  # kink
        spec = _demo_line_scene(73.0, (-0.5, 0.5, -0.5, 0.5),
                                (-0.49, 0.49, -0.49, 0.0), (300, 300),
                                2.0 / 300.0)
        image, labels, truth = harness.render_problem(spec)
        (out / "splines.json").write_text(spline_io.dumps([]), encoding="utf-8")

    if image.shape[2] == 1:
        image = np.repeat(image, 3, axis=2)
        truth = np.repeat(truth, 3, axis=2)
    fileio.save_image(out / "image.png", image)
    fileio.save_image(out / "truth.png", truth)
    fileio.save_labels(out / "mask.pgm", labels)
    meta = {
        "name": name,
        "omega": list(spec.omega),
        "domain": list(spec.domain),
        "geometry": spec.geometry,
        "theta_deg": spec.theta_deg,
        "half_width": spec.half_width,
        "resolution": list(spec.resolution),
    }
    (out / "scene.json").write_text(json.dumps(meta, indent=1) + "\n",
                                    encoding="utf-8")
    click.echo(f"demo '{name}' -> {out}")


if __name__ == "__main__":
    main()
