"""Run orchestration: configuration, time loop, snapshots, convergence study."""

import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .basis import BasisSpec, QuadratureRule
from .cases import CaseSpec, case_by_name, init_field
from .dg import ModalField, eval_modal
from .diagnostics import (
    CONSERVED_NAMES,
    conservation_audit,
    convergence_order,
    divergence_report,
    divergence_values,
    l2_error,
)
from .ldf import apply_ldf
from .physics import BX, BY, BZ, PRES, RHO, UX, UY, UZ, Array, cons_to_prim_unchecked
from .stepping import StepControls, compute_dt, step

CSV_HEADER = "x,y,rho,ux,uy,uz,p,Bx,By,Bz,mach,pmag,divB"
SNAPSHOT_POINT_MODES = ("centers", "quadrature")


@dataclass(frozen=True)
class RunConfig:
    """Everything one solver invocation needs; mirrors the config-file keys."""

    case: str
    nx: int | None = None
    ny: int | None = None
    degree: int = 2
    cfl: float = 0.15
    t_final: float | None = None
    snapshots: tuple[float, ...] = ()
    out_dir: str = "out"
    out_format: str = "csv"
    oe_enabled: bool = True
    ldf_enabled: bool = True
    workers: int = 1
    snapshot_points: str = "centers"   # debugging aid: dump quadrature points

    def __post_init__(self):
        if self.out_format not in ("csv", "vtk"):
            raise ValueError("out_format must be 'csv' or 'vtk'")
        if self.snapshot_points not in SNAPSHOT_POINT_MODES:
            raise ValueError(f"snapshot_points must be one of {SNAPSHOT_POINT_MODES}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


_BOOL_WORDS = {"true": True, "1": True, "yes": True, "on": True,
               "false": False, "0": False, "no": False, "off": False}


def _parse_value(name: str, text: str, kind):
    text = text.strip()
    if kind == "bool":
        try:
            return _BOOL_WORDS[text.lower()]
        except KeyError:
            raise ValueError(f"config key {name!r}: cannot read {text!r} as a bool") from None
    if kind == "snapshots":
        if not text:
            return ()
        return tuple(float(part) for part in text.split(","))
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
    except ValueError:
        raise ValueError(f"config key {name!r}: cannot read {text!r} as a {kind}") from None
    return text


_CONFIG_KINDS = {
    "case": "str", "nx": "int", "ny": "int", "degree": "int", "cfl": "float",
    "t_final": "float", "snapshots": "snapshots", "out_dir": "str",
    "out_format": "str", "oe_enabled": "bool", "ldf_enabled": "bool",
    "workers": "int", "snapshot_points": "str",
}


def load_config(path) -> RunConfig:
    """Parse a flat `key = value` file into a RunConfig.

    Blank lines and lines starting with '#' are skipped.  Keys are exactly
    the RunConfig field names; unknown keys are an error.
    """
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, text = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KINDS:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = _parse_value(key, text, _CONFIG_KINDS[key])
    if "case" not in values:
        raise ValueError(f"{path}: config must set 'case'")
    return RunConfig(**values)


def merge_config(base: RunConfig, **overrides) -> RunConfig:
    """CLI flags override file values; None means 'not given'."""
    given = {k: v for k, v in overrides.items() if v is not None}
    return replace(base, **given) if given else base


@dataclass
class RunSummary:
    case: str
    nx: int
    ny: int
    degree: int
    t_final: float
    steps: int
    wall_time: float
    totals: Array
    div_max: float
    div_rms: float
    min_rho: float
    min_p: float
    l2_errors: dict | None
    snapshot_paths: list

    def to_text(self) -> str:
        lines = [
            f"case: {self.case}",
            f"mesh: {self.nx} x {self.ny}  degree: {self.degree}",
            f"t_final: {self.t_final:.17g}  steps: {self.steps}  "
            f"wall_time_s: {self.wall_time:.3f}",
            "totals: " + "  ".join(
                f"{name}={val:.17g}" for name, val in zip(CONSERVED_NAMES, self.totals)),
            f"divB: max={self.div_max:.6e}  rms={self.div_rms:.6e}",
            f"cell_centers: min_rho={self.min_rho:.17g}  min_p={self.min_p:.17g}",
        ]
        if self.l2_errors is not None:
            lines.append("l2_errors: " + "  ".join(
                f"{name}={val:.6e}" for name, val in self.l2_errors.items()))
        return "\n".join(lines) + "\n"


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def snapshot_columns(field: ModalField, gamma: float, points: str = "centers"):
    """Sampled output table: coordinate arrays plus the 11 derived fields.

    Rows follow row-major cell order (y outer, x inner); quadrature mode
    appends the cell's points in the rule's fixed order.
    """
    mesh, basis = field.mesh, field.basis
    if points == "centers":
        ref_x = np.zeros(1)
        ref_y = np.zeros(1)
    else:
        rule = QuadratureRule(basis.n_quad_1d)
        ref_x, ref_y = rule.volume_x, rule.volume_y
    phi = basis.eval(ref_x, ref_y)
    u = eval_modal(field.coeffs, phi)                     # (nc, q, ny, nx)
    w = cons_to_prim_unchecked(u, gamma)
    with np.errstate(invalid="ignore", divide="ignore"):
        sound = np.sqrt(gamma * w[PRES] / w[RHO])
        mach = np.sqrt(w[UX] ** 2 + w[UY] ** 2 + w[UZ] ** 2) / sound
    pmag = 0.5 * (w[BX] ** 2 + w[BY] ** 2 + w[BZ] ** 2)
    div = divergence_values(field, ref_x, ref_y)          # (q, ny, nx)
    xs = mesh.centers_x()[None, None, :] + 0.5 * mesh.hx * ref_x[:, None, None]
    ys = mesh.centers_y()[None, :, None] + 0.5 * mesh.hy * ref_y[:, None, None]
    xs, ys = np.broadcast_arrays(xs, ys)
    cols = [xs, ys, w[RHO], w[UX], w[UY], w[UZ], w[PRES],
            w[BX], w[BY], w[BZ], mach, pmag, div]
    # flatten to row-major rows: (ny, nx, q) per column
    return [np.ascontiguousarray(np.moveaxis(c, 0, -1)).reshape(-1) for c in cols]


def write_snapshot(field: ModalField, t: float, out_format: str, path,
                   gamma: float, points: str = "centers") -> None:
    """Write one CSV or legacy-VTK snapshot of the current field."""
    del t  # time is encoded in the file name by the caller
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if out_format == "csv":
        cols = snapshot_columns(field, gamma, points)
        rows = np.column_stack(cols)
        with open(path, "w", newline="\n") as fh:
            fh.write(CSV_HEADER + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    elif out_format == "vtk":
        if points != "centers":
            raise ValueError("quadrature dumps are CSV-only")
        _write_vtk(field, path, gamma)
    else:
        raise ValueError("out_format must be 'csv' or 'vtk'")


def _write_vtk(field: ModalField, path: Path, gamma: float) -> None:
    mesh = field.mesh
    cols = snapshot_columns(field, gamma, "centers")
    names = CSV_HEADER.split(",")[2:]
    with open(path, "w", newline="\n") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write("dgmhd snapshot\n")
        fh.write("ASCII\n")
        fh.write("DATASET STRUCTURED_POINTS\n")
        fh.write(f"DIMENSIONS {mesh.nx + 1} {mesh.ny + 1} 1\n")
        fh.write(f"ORIGIN {_fmt(mesh.x_lo)} {_fmt(mesh.y_lo)} 0\n")
        fh.write(f"SPACING {_fmt(mesh.hx)} {_fmt(mesh.hy)} 1\n")
        fh.write(f"CELL_DATA {mesh.n_cells}\n")
        for name, col in zip(names, cols[2:]):
            fh.write(f"SCALARS {name} double 1\n")
            fh.write("LOOKUP_TABLE default\n")
            for v in col:
                fh.write(_fmt(v) + "\n")


# components reported in error summaries and convergence tables
REPORT_COMPONENTS = (("rho", RHO), ("mom_x", 1), ("Bx", BX), ("energy", 4))


def advance(field: ModalField, gamma: float, t_final: float, cfl: float,
            oe_enabled: bool = True, ldf_enabled: bool = True,
            workers: int = 1, targets: tuple[float, ...] = (),
            on_target=None, max_steps: int = 10_000_000):
    """March from t=0 to t_final, landing exactly on each target time.

    Returns (field, steps).  `on_target(field, t)` fires at every target
    (targets beyond t_final are ignored; t_final itself is always last).
    """
    stops = sorted({float(s) for s in targets if 0.0 < s <= t_final} | {t_final})
    t = 0.0
    steps = 0
    for stop in stops:
        while t < stop:
            if steps >= max_steps:
                raise RuntimeError(f"step cap {max_steps} reached at t={t}")
            controls = StepControls(cfl=cfl, t_final=stop, max_steps=max_steps)
            dt = compute_dt(field, gamma, controls, t)
            field = step(field, dt, gamma, oe_enabled=oe_enabled,
                         ldf_enabled=ldf_enabled, workers=workers)
            steps += 1
            t = stop if t + dt >= stop else t + dt
        if on_target is not None:
            on_target(field, stop)
    return field, steps


def run(config: RunConfig) -> RunSummary:
    """Execute one configured run and write its artifacts.

    Snapshots land at the requested times (exactly); a plain-text summary
    goes to <out_dir>/summary.txt.  Returns the summary object.
    """
    case = case_by_name(config.case)
    mesh = case.make_mesh(config.nx, config.ny)
    basis = BasisSpec(config.degree)
    gamma = case.gamma
    t_final = config.t_final if config.t_final is not None else case.t_final
    out_dir = Path(config.out_dir)
    ext = config.out_format
    written: list = []

    field = init_field(case, mesh, basis)
    if config.ldf_enabled:
        field = apply_ldf(field)

    def snap_path(t: float) -> Path:
        return out_dir / f"{case.name}_t{t:.6f}.{ext}"

    def on_target(f: ModalField, t: float) -> None:
        if t in snap_times:
            p = snap_path(t)
            write_snapshot(f, t, ext, p, gamma, config.snapshot_points)
            written.append(p)

    snap_times = {float(s) for s in config.snapshots}
    start = time.perf_counter()
    if any(s == 0.0 for s in snap_times):
        on_target(field, 0.0)
    field, steps = advance(field, gamma, t_final, config.cfl,
                           oe_enabled=config.oe_enabled,
                           ldf_enabled=config.ldf_enabled,
                           workers=config.workers,
                           targets=tuple(snap_times), on_target=on_target)
    wall = time.perf_counter() - start

    cols = snapshot_columns(field, gamma, "centers")
    div_max, div_rms = divergence_report(field)
    errors = None
    if case.exact is not None:
        errors = {name: l2_error(field, case.exact, t_final, comp, gamma)
                  for name, comp in REPORT_COMPONENTS}
    summary = RunSummary(
        case=case.name, nx=mesh.nx, ny=mesh.ny, degree=config.degree,
        t_final=t_final, steps=steps, wall_time=wall,
        totals=conservation_audit(field), div_max=div_max, div_rms=div_rms,
        min_rho=float(cols[2].min()), min_p=float(cols[6].min()),
        l2_errors=errors, snapshot_paths=written,
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "summary.txt").write_text(summary.to_text())
    return summary


@dataclass
class ConvergenceReport:
    case: str
    degree: int
    cfl: float
    t_final: float
    meshes: list
    component_names: tuple
    errors: Array   # (n_meshes, n_components)
    orders: Array   # (n_meshes - 1, n_components)


def convergence_study(case_name: str = "vortex", meshes=(16, 32, 64),
                      degree: int = 2, cfl: float = 0.15,
                      t_final: float | None = None,
                      workers: int = 1) -> ConvergenceReport:
    """Run a mesh sequence and tabulate L2 errors and observed orders."""
    case = case_by_name(case_name)
    if case.exact is None:
        raise ValueError(f"case {case_name!r} has no exact solution to converge against")
    t_end = t_final if t_final is not None else case.t_final
    errs = []
    for n in meshes:
        mesh = case.make_mesh(n, n)
        basis = BasisSpec(degree)
        field = apply_ldf(init_field(case, mesh, basis))
        field, _ = advance(field, case.gamma, t_end, cfl, workers=workers)
        errs.append([l2_error(field, case.exact, t_end, comp, case.gamma)
                     for _, comp in REPORT_COMPONENTS])
    errors = np.array(errs)
    orders = np.stack([convergence_order(errors[:, c])
                       for c in range(errors.shape[1])], axis=1)
    return ConvergenceReport(
        case=case.name, degree=degree, cfl=cfl, t_final=t_end,
        meshes=list(meshes), component_names=tuple(n for n, _ in REPORT_COMPONENTS),
        errors=errors, orders=orders)


def format_convergence_table(report: ConvergenceReport) -> str:
    """Plain-text table: one mesh per row, error and order per component."""
    head = [f"# case={report.case} degree={report.degree} "
            f"cfl={report.cfl:g} t_final={report.t_final:g}"]
    cols = ["mesh"]
    for name in report.component_names:
        cols += [f"{name}_err", f"{name}_order"]
    head.append("# columns: " + " ".join(cols))
    lines = head
    for r, n in enumerate(report.meshes):
        parts = [f"{n:d}"]
        for c in range(len(report.component_names)):
            parts.append(f"{report.errors[r, c]:.6e}")
            parts.append("-" if r == 0 else f"{report.orders[r - 1, c]:.2f}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
