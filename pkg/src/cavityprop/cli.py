"""Command-line front end.

Subcommands:

    quasimode   pole decompositions and propagator samples along an omega line
    scatter     two-photon joint spectrum grid, CSV/JSON export, contour plot
    oracle      discretized-Hamiltonian comparison report
    selftest    invariant suite with one PASS/FAIL line per group

All inputs are in units of kappa_c (default 1).  The packet width accepts
either a plain number or "<x>xgamma", a multiple of the spontaneous-decay
width gamma_sp.  Flags override values from an optional JSON config file,
which overrides built-in defaults.  Exit codes: 0 success, 1 invalid
configuration, 2 numerical failure (acceptance gate, pole collision,
failed selftest group), 3 I/O failure.
"""

from __future__ import annotations

import argparse
import cmath
import dataclasses
import itertools
import json
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import cavity_modes
from .diagrammatics import (
    ProcessSpec,
    closed_form_g1,
    closed_form_g2,
    count_sequences,
    enumerate_sequences,
    full_propagator,
)
from .oracle import build, compare_joint_spectrum
from .quasimode_propagators import (
    ModelParams,
    PoleEvaluationError,
    gamma_sp,
    phi,
    pole_decomposition,
)
from .scattering import (
    InputPacket,
    JointSpectrumGrid,
    PoleCollisionError,
    i1,
    i2,
    integrated_norm_exact,
    joint_spectrum_grid,
)

_SUBSET_NAMES = {
    "all": "all",
    "unlinked": "unlinked_only",
    "unlinked+linked1": "unlinked_plus_lowest_linked",
}


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass(frozen=True)
class RunConfig:
    """Resolved run parameters; every field is a plain JSON-serializable value.

    kappa_in is stored already resolved to an absolute width, so
    parse -> serialize -> parse is the identity.
    """

    omega_a: float = 0.0
    k_c: float = 0.0
    kappa_c: float = 1.0
    lam: float = 0.1
    n_max: int = 6
    kappa_in: float | None = None  # None means gamma_sp of the resolved params
    window: float = 1.0
    points: int = 241
    subset: str = "all"
    out: str | None = None
    fmt: str = "csv"
    plot: bool = True
    norm_tol: float = 0.05
    oracle_modes: int = 2000
    oracle_window: float = 40.0
    t_final: float | None = None  # None means 50 / gamma_sp
    oracle_tol: float = 1e-4
    threshold: float = 0.05
    strict: bool = False
    omega_line: tuple[float, float, int] | None = None

    def __post_init__(self):
        if self.kappa_c <= 0:
            raise ValueError("kappa_c must be positive")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        if self.kappa_in is not None and self.kappa_in <= 0:
            raise ValueError("kappa_in must be positive")
        if self.window <= 0:
            raise ValueError("window must be positive")
        if self.points < 16:
            raise ValueError("points must be at least 16")
        if self.subset not in _SUBSET_NAMES:
            raise ValueError(f"subset must be one of {sorted(_SUBSET_NAMES)}")
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.norm_tol <= 0 or self.threshold <= 0 or self.oracle_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.n_max < 0:
            raise ValueError("n_max must be nonnegative")
        if self.t_final is not None and self.t_final <= 0:
            raise ValueError("t_final must be positive")
        if self.omega_line is not None:
            lo, hi, count = self.omega_line
            if not (hi > lo and int(count) >= 2):
                raise ValueError("omega_line must be (lo, hi, count>=2) with hi > lo")
            object.__setattr__(self, "omega_line", (float(lo), float(hi), int(count)))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if self.omega_line is not None:
            d["omega_line"] = list(self.omega_line)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if d.get("omega_line") is not None:
            d["omega_line"] = tuple(d["omega_line"])
        return cls(**d)

    def model_params(self) -> ModelParams:
        return ModelParams(
            omega_a=self.omega_a,
            k_c=self.k_c,
            kappa_c=self.kappa_c,
            lam=self.lam,
            n_max=self.n_max,
        )

    def packet(self, params: ModelParams) -> InputPacket:
        width = self.kappa_in if self.kappa_in is not None else gamma_sp(params)
        return InputPacket(kappa_in=width, center=params.k_c)


def _parse_kappa_in(text: str, params: ModelParams) -> float:
    """A plain number, or '<x>xgamma' as a multiple of gamma_sp."""
    t = text.strip().lower()
    if t.endswith("xgamma"):
        return float(t[: -len("xgamma")]) * gamma_sp(params)
    return float(t)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavityprop",
        description="Two-level atom in a leaky cavity: propagators and "
        "single-photon scattering spectra. All inputs in units of kappa_c.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--lambda", dest="lam", type=float, help="coupling strength (kappa_c^2 units)")
        p.add_argument("--omega-a", dest="omega_a", type=float, help="atom frequency (default k_c)")
        p.add_argument("--k-c", dest="k_c", type=float, help="cavity line center (default 0)")
        p.add_argument("--kappa-c", dest="kappa_c", type=float, help="cavity linewidth (default 1)")
        p.add_argument("--n-max", dest="n_max", type=int, help="largest photon sector (default 6)")
        p.add_argument("--out", help="output file path")
        p.add_argument("--format", dest="fmt", choices=["csv", "json"], help="grid/table file format")

    p_quasi = sub.add_parser("quasimode", help="pole decompositions and propagator samples")
    common(p_quasi)
    p_quasi.add_argument(
        "--omega-line",
        help="omega samples LO:HI:COUNT (default k_c-5:k_c+5:10)",
    )

    p_scatter = sub.add_parser("scatter", help="two-photon joint spectrum grid")
    common(p_scatter)
    p_scatter.add_argument("--kappa-in", help="packet width, number or '<x>xgamma' (default 1xgamma)")
    p_scatter.add_argument("--window", type=float, help="half-width of the k grid around k_c")
    p_scatter.add_argument("--points", type=int, help="grid points per axis")
    p_scatter.add_argument("--subset", choices=sorted(_SUBSET_NAMES), help="diagram subset")
    p_scatter.add_argument("--norm-tol", dest="norm_tol", type=float, help="acceptance band around norm 1 (subset=all)")
    p_scatter.add_argument("--no-plot", dest="plot", action="store_false", default=None, help="skip the PNG contour plot")

    p_oracle = sub.add_parser("oracle", help="discretized-Hamiltonian comparison")
    common(p_oracle)
    p_oracle.add_argument("--kappa-in", help="packet width, number or '<x>xgamma'")
    p_oracle.add_argument("--window", type=float, help="comparison window around k_c")
    p_oracle.add_argument("--oracle-modes", dest="oracle_modes", type=int, help="number of discretized modes")
    p_oracle.add_argument("--oracle-window", dest="oracle_window", type=float, help="discretization half-width")
    p_oracle.add_argument("--t-final", dest="t_final", type=float, help="evolution time (default 50/gamma_sp)")
    p_oracle.add_argument("--oracle-tol", dest="oracle_tol", type=float, help="splitting error budget")
    p_oracle.add_argument("--threshold", type=float, help="L2 relative error gate (default 0.05)")
    p_oracle.add_argument("--strict", action="store_true", default=None, help="turn warnings into failures")

    p_self = sub.add_parser("selftest", help="invariant suite")
    common(p_self)
    p_self.add_argument("--kappa-in", help="packet width for the normalization group")

    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    """defaults < config file < flags; kappa_in resolved against gamma_sp."""
    merged: dict = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        if not isinstance(file_cfg, dict):
            raise ValueError("config file must hold a JSON object")
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = set(file_cfg) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_cfg)

    skip = {"command", "config", "kappa_in", "omega_line"}
    for key, value in vars(args).items():
        if key in skip or value is None:
            continue
        merged[key] = value

    if merged.get("omega_a") is None:
        merged["omega_a"] = merged.get("k_c", 0.0)
    if merged.get("omega_line") is not None:
        merged["omega_line"] = tuple(merged["omega_line"])
    if getattr(args, "omega_line", None) is not None:
        parts = args.omega_line.split(":")
        if len(parts) != 3:
            raise ValueError("--omega-line expects LO:HI:COUNT")
        merged["omega_line"] = (float(parts[0]), float(parts[1]), int(parts[2]))

    # kappa_in may reference gamma_sp, which needs the resolved params first
    pending = getattr(args, "kappa_in", None)
    if pending is None and isinstance(merged.get("kappa_in"), str):
        pending = merged.pop("kappa_in")
    cfg = RunConfig.from_dict(merged)
    if pending is not None:
        resolved = _parse_kappa_in(str(pending), cfg.model_params())
        cfg = dataclasses.replace(cfg, kappa_in=resolved)
    return cfg


def _write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _grid_csv(grid: JointSpectrumGrid) -> str:
    lines = ["k1\\k2," + ",".join(_fmt(k) for k in grid.k2_axis)]
    for i, k1 in enumerate(grid.k1_axis):
        lines.append(_fmt(k1) + "," + ",".join(_fmt(v) for v in grid.values[i]))
    return "\n".join(lines) + "\n"


def _sidecar(cfg: RunConfig, params, packet, grid, exact_norm: float) -> dict:
    return {
        "params": {
            "omega_a": params.omega_a,
            "k_c": params.k_c,
            "kappa_c": params.kappa_c,
            "lambda": params.lam,
        },
        "kappa_in": packet.kappa_in,
        "gamma_sp": gamma_sp(params),
        "subset": cfg.subset,
        "window": cfg.window,
        "points": cfg.points,
        "integrated_norm": exact_norm,
        "window_mass": grid.integrated_norm,
    }


def _plot_grid(grid: JointSpectrumGrid, packet, params, path: Path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    gsp = gamma_sp(params)
    scale, unit = (gsp, r"\gamma_{sp}") if gsp > 0 else (params.kappa_c, r"\kappa_c")
    fig, ax = plt.subplots(figsize=(6.4, 5.4))
    x = (grid.k1_axis - params.k_c) / scale
    y = (grid.k2_axis - params.k_c) / scale
    mesh = ax.pcolormesh(x, y, grid.values.T, shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=r"$|C(k_1,k_2)|^2$")
    ax.set_xlabel(rf"$(k_1 - k_c)/{unit}$")
    ax.set_ylabel(rf"$(k_2 - k_c)/{unit}$")
    ax.set_title(
        rf"$\kappa_{{in}} = {packet.kappa_in / scale:.3g}\,{unit}$, "
        rf"$\lambda = {params.lam:.3g}\,\kappa_c^2$"
    )
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_quasimode(cfg: RunConfig) -> int:
    params = cfg.model_params()
    line = cfg.omega_line
    if line is None:
        line = (params.k_c - 5 * params.kappa_c, params.k_c + 5 * params.kappa_c, 10)
    omegas = np.linspace(line[0], line[1], line[2])

    pole_rows = []
    for n in range(1, params.n_max + 1):
        dec = pole_decomposition(n, params)
        pole_rows.append(
            {
                "n": n,
                "omega_plus": dec.omega_plus,
                "omega_minus": dec.omega_minus,
                "a_plus": dec.a_plus,
                "a_minus": dec.a_minus,
                "a_sum_deviation": abs(dec.a_plus + dec.a_minus - 1.0),
                "rabi": dec.rabi,
                "degenerate": dec.degenerate,
            }
        )

    pq_by_n = {0: [(0, 0)]}
    for n in range(1, params.n_max + 1):
        pq_by_n[n] = [(0, 0), (0, 1), (1, 1)]
    sample_rows = []
    for w in omegas:
        row = {"omega": float(w)}
        for n, pqs in pq_by_n.items():
            for p, q in pqs:
                row[f"phi{n}_{p}{q}"] = complex(phi(n, p, q, complex(w), params))
        sample_rows.append(row)

    def emit_complex(v):
        return f"{_fmt(v.real)},{_fmt(v.imag)}"

    lines = ["# pole decompositions"]
    header = [
        "n",
        "re_omega_plus", "im_omega_plus", "re_omega_minus", "im_omega_minus",
        "re_a_plus", "im_a_plus", "re_a_minus", "im_a_minus",
        "a_sum_deviation", "rabi", "degenerate",
    ]
    lines.append(",".join(header))
    for r in pole_rows:
        lines.append(
            ",".join(
                [
                    str(r["n"]),
                    emit_complex(r["omega_plus"]), emit_complex(r["omega_minus"]),
                    emit_complex(r["a_plus"]), emit_complex(r["a_minus"]),
                    _fmt(r["a_sum_deviation"]), _fmt(r["rabi"]),
                    "1" if r["degenerate"] else "0",
                ]
            )
        )
    lines.append("")
    lines.append("# propagator samples")
    cols = ["omega"]
    for n, pqs in pq_by_n.items():
        for p, q in pqs:
            cols += [f"re_phi{n}_{p}{q}", f"im_phi{n}_{p}{q}"]
    lines.append(",".join(cols))
    for row in sample_rows:
        cells = [_fmt(row["omega"])]
        for n, pqs in pq_by_n.items():
            for p, q in pqs:
                cells.append(emit_complex(row[f"phi{n}_{p}{q}"]))
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"

    print(text, end="")
    if cfg.out:
        if cfg.fmt == "json":
            payload = {
                "poles": [
                    {
                        k: ([v.real, v.imag] if isinstance(v, complex) else v)
                        for k, v in r.items()
                    }
                    for r in pole_rows
                ],
                "samples": [
                    {
                        k: ([v.real, v.imag] if isinstance(v, complex) else v)
                        for k, v in r.items()
                    }
                    for r in sample_rows
                ],
            }
            _write_text(Path(cfg.out), json.dumps(payload, indent=2) + "\n")
        else:
            _write_text(Path(cfg.out), text)
    return 0


def cmd_scatter(cfg: RunConfig) -> int:
    params = cfg.model_params()
    packet = cfg.packet(params)
    subset = _SUBSET_NAMES[cfg.subset]
    grid = joint_spectrum_grid(cfg.window, cfg.points, packet, params, subset=subset)
    exact_norm = integrated_norm_exact(packet, params, subset=subset)

    out = Path(cfg.out) if cfg.out else Path("joint_spectrum." + cfg.fmt)
    meta = _sidecar(cfg, params, packet, grid, exact_norm)
    if cfg.fmt == "csv":
        _write_text(out, _grid_csv(grid))
        _write_text(
            out.with_suffix(".json"), json.dumps(meta, indent=2, sort_keys=True) + "\n"
        )
    else:
        payload = dict(meta)
        payload["k1_axis"] = [float(v) for v in grid.k1_axis]
        payload["k2_axis"] = [float(v) for v in grid.k2_axis]
        payload["values"] = [[float(v) for v in row] for row in grid.values]
        _write_text(out, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if cfg.plot:
        _plot_grid(grid, packet, params, out.with_suffix(".png"))

    print(f"wrote {out} (subset={cfg.subset}, integrated norm {exact_norm:.6f})")
    if cfg.subset == "all" and abs(exact_norm - 1.0) > cfg.norm_tol:
        print(
            f"normalization gate failed: |{exact_norm:.6f} - 1| > {cfg.norm_tol}",
            file=sys.stderr,
        )
        return 2
    return 0


def cmd_oracle(cfg: RunConfig) -> int:
    params = cfg.model_params()
    packet = cfg.packet(params)
    gsp = gamma_sp(params)
    t_final = cfg.t_final if cfg.t_final is not None else (50.0 / gsp if gsp > 0 else 50.0)
    model = build(params, cfg.oracle_modes, cfg.oracle_window, kappa_in=packet.kappa_in)

    # node-aligned comparison axes keep the interpolation step exact
    lo = np.searchsorted(model.k_grid, params.k_c - cfg.window)
    hi = np.searchsorted(model.k_grid, params.k_c + cfg.window, side="right")
    axes = model.k_grid[lo:hi]
    if axes.size < 8:
        raise ValueError("comparison window too narrow for the mode grid")
    subset = _SUBSET_NAMES[cfg.subset]
    k1, k2 = np.meshgrid(axes, axes, indexing="ij")
    from .scattering import two_photon_amplitude

    values = np.abs(two_photon_amplitude(k1, k2, packet, params, subset=subset)) ** 2
    grid = JointSpectrumGrid(
        k1_axis=axes, k2_axis=axes, values=values, params=params, packet=packet,
        diagram_subset=subset, integrated_norm=float("nan"),
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = compare_joint_spectrum(model, packet, t_final, grid, tol=cfg.oracle_tol)
    report["threshold"] = cfg.threshold
    report["gamma_sp"] = gsp
    report["kappa_in"] = packet.kappa_in
    report["warnings"] = [str(w.message) for w in caught]
    report["passed"] = report["l2_rel_error"] <= cfg.threshold
    if cfg.strict and caught:
        report["passed"] = False

    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    print(text, end="")
    if cfg.out:
        _write_text(Path(cfg.out), text)
    return 0 if report["passed"] else 2


def _selftest_groups(cfg: RunConfig):
    params = cfg.model_params()
    rng = np.random.default_rng(20240817)

    def mirror_unitarity():
        worst = 0.0
        half_pi = math.pi / 2.0
        for mu in (0.5, 2.0, 8.0):
            geom = cavity_modes.CavityGeometry(length=math.pi, mu_left=mu, mu_right=mu)
            for k in rng.uniform(0.5, 12.0, size=25):
                k = float(k)
                mc = cavity_modes.mirror_coefficients(k, mu)
                worst = max(worst, abs(abs(mc.r) ** 2 + abs(mc.t) ** 2 - 1.0))
                worst = max(worst, abs((mc.r * mc.t.conjugate()).real))
                rl, il, jl, tl = cavity_modes._mode_coefficients("left", k, geom)
                _, _, _, tr = cavity_modes._mode_coefficients("right", k, geom)
                worst = max(worst, abs(abs(rl) ** 2 + abs(tl) ** 2 - 1.0))
                worst = max(worst, abs(tl - tr))
                # continuity at the near mirror, both branch formulas exactly there
                outside = cmath.exp(-1j * k * half_pi) + rl * cmath.exp(1j * k * half_pi)
                inside = il * cmath.exp(-1j * k * half_pi) + jl * cmath.exp(1j * k * half_pi)
                worst = max(worst, abs(outside - inside))
        return worst, 1e-10

    def pole_identities():
        worst = 0.0
        for n in range(1, params.n_max + 1):
            dec = pole_decomposition(n, params)
            worst = max(worst, abs(dec.a_plus + dec.a_minus - 1.0))
            for w in rng.uniform(-4, 4, size=8) + 1j * rng.uniform(0.2, 2.0, size=8):
                worst = max(worst, abs(phi(n, 0, 1, w, params) - phi(n, 1, 0, w, params)))
                lhs = phi(n, 1, 1, w, params) * (w - params.omega_a - (n - 1) * params.pole_c)
                rhs = phi(n, 0, 0, w, params) * (w - n * params.pole_c)
                worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
        return worst, 1e-12

    def generic_vs_closed_form():
        worst = 0.0
        for _ in range(12):
            w = complex(rng.uniform(-3, 3), rng.uniform(0.3, 2.5))
            ks = rng.uniform(-3, 3, size=4)
            for p, q in itertools.product((0, 1), repeat=2):
                spec1 = ProcessSpec(1, p, q, outputs=tuple(ks[: 1 - p]), inputs=tuple(ks[2 : 3 - q]))
                got = full_propagator(spec1, w, params).smooth_part
                want = closed_form_g1(p, q, w, (spec1.outputs, spec1.inputs), params).smooth_part
                worst = max(worst, abs(got - want) / max(1e-300, abs(want)))
                spec2 = ProcessSpec(2, p, q, outputs=tuple(ks[: 2 - p]), inputs=tuple(ks[2 : 4 - q]))
                got = full_propagator(spec2, w, params).smooth_part
                want = closed_form_g2(p, q, w, (spec2.outputs, spec2.inputs), params).smooth_part
                worst = max(worst, abs(got - want) / max(1e-300, abs(want)))
        return worst, 1e-12

    def sequence_counts():
        worst = 0
        for n in range(0, params.n_max + 1):
            for p, q in itertools.product((0, 1), repeat=2):
                if n < max(p, q):
                    continue
                dp = count_sequences(n, p, q)
                pat = _pattern_count(n, p, q)
                expected = pat * math.factorial(n - q) * math.factorial(n - p)
                worst = max(worst, abs(dp - expected))
                if n <= 3:
                    worst = max(worst, abs(dp - len(enumerate_sequences(n, p, q))))
        return worst, 0.5

    def residue_vs_quadrature():
        packet = cfg.packet(params)
        worst = 0.0
        for _ in range(4):
            k1, k2 = rng.uniform(-1.5, 1.5, size=2)
            for fn in (i1, i2):
                a = fn(k1, k2, packet, params, method="residue")
                b = fn(k1, k2, packet, params, method="quadrature")
                worst = max(worst, abs(a - b) / max(1e-300, abs(a)))
        return worst, 1e-5

    def normalization():
        packet = cfg.packet(params)
        return abs(integrated_norm_exact(packet, params) - 1.0), 1e-3

    return [
        ("mirror-unitarity", mirror_unitarity),
        ("pole-identities", pole_identities),
        ("generic-vs-closed-form", generic_vs_closed_form),
        ("sequence-counts", sequence_counts),
        ("residue-vs-quadrature", residue_vs_quadrature),
        ("normalization", normalization),
    ]


def _pattern_count(n: int, p: int, q: int) -> int:
    """Absorb/emit letter patterns with the subsystem never emptied below emission.

    Exhaustive walk over the letter strings only; the momentum labelings
    multiply in as factorials.  Cheap for n <= 6.
    """
    n_in, n_out = n - q, n - p
    total = 0
    stack = [(0, 0)]
    while stack:
        a, e = stack.pop()
        if a == n_in and e == n_out:
            total += 1
            continue
        if a < n_in:
            stack.append((a + 1, e))
        if e < n_out and q + a - e >= 1:
            stack.append((a, e + 1))
    return total


def cmd_selftest(cfg: RunConfig) -> int:
    params = cfg.model_params()
    failures = 0
    for name, fn in _selftest_groups(cfg):
        try:
            worst, tol = fn()
            ok = worst <= tol
        except Exception as exc:  # a crashed group is a failed group
            print(f"FAIL {name}: {exc}")
            failures += 1
            continue
        print(f"{'PASS' if ok else 'FAIL'} {name}: worst {worst:.3e} (tol {tol:.0e})")
        failures += 0 if ok else 1
    for n in range(0, min(params.n_max, 6) + 1):
        counts = []
        for p, q in ((0, 0), (0, 1), (1, 0), (1, 1)):
            if n < max(p, q):
                continue
            counts.append(f"G{n}_{p}{q}={count_sequences(n, p, q)}")
        print(f"sequences N={n}: " + ", ".join(counts))
    if failures:
        print(f"{failures} group(s) failed", file=sys.stderr)
        return 2
    print("all groups passed")
    return 0


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        cfg = _resolve_config(args)
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 3

    handlers = {
        "quasimode": cmd_quasimode,
        "scatter": cmd_scatter,
        "oracle": cmd_oracle,
        "selftest": cmd_selftest,
    }
    try:
        return handlers[args.command](cfg)
    except (ValueError, TypeError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1
    except (PoleEvaluationError, PoleCollisionError, FloatingPointError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
