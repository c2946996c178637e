"""Command-line front end.

Exit codes: 0 success, 1 verification or tolerance failure, 2 usage error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .clifford import blade_label
from .sphere import SphereSignal, SphereTransform, SpectralCoefficients, build_basis
from .wavelets import (
    PROFILES,
    ScaleGrid,
    SpectralProfile,
    WaveletCoefficients,
    heat_kernel,
    sphere_convolution,
    wavelet_family,
    wavelet_reconstruct,
    wavelet_transform,
)

log = logging.getLogger("cliffwave")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
COMMANDS = ("basis", "verify", "analyze", "synthesize", "heat", "wavelet", "spin-eig")
WAVELET_MODES = ("transform", "reconstruct", "roundtrip")
EXAMPLE_SIGNAL = "example_signal.json"


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    m: int = 2
    K: int | None = None
    profile: str = "heat-h"
    rho_min: float = 1e-3
    rho_max: float = 20.0
    rho_ratio: float = 1.05
    t: float = 0.1
    tol: float | None = None
    inp: str | None = None
    out: str | None = None
    fmt: str = "json"
    seed: int = 0
    mode: str = "roundtrip"
    exact_scales: bool = False
    casimir_c: str | None = None
    max_nodes: int = 2_000_000

    def validate(self) -> RunConfig:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.m < 2:
            raise UsageError("--m must be at least 2")
        if self.K is not None and self.K < 0:
            raise UsageError("--max-degree must be non-negative")
        if self.profile not in PROFILES:
            raise UsageError(f"--profile must be one of {PROFILES}")
        if not (0 < self.rho_min < self.rho_max) or self.rho_ratio <= 1:
            raise UsageError("need 0 < --rho-min < --rho-max and --rho-ratio > 1")
        if self.t <= 0:
            raise UsageError("--t must be positive")
        if self.tol is not None and self.tol <= 0:
            raise UsageError("--tol must be positive")
        if self.fmt not in ("json", "csv"):
            raise UsageError("--format must be json or csv")
        if self.mode not in WAVELET_MODES:
            raise UsageError(f"wavelet mode must be one of {WAVELET_MODES}")
        if self.casimir_c is not None:
            try:
                Fraction(self.casimir_c)
            except (ValueError, ZeroDivisionError) as exc:
                raise UsageError(f"--casimir-c: {exc}") from None
        return self

    def degree(self, default: int) -> int:
        return default if self.K is None else self.K

    def tolerance(self, default: float) -> float:
        return default if self.tol is None else self.tol

    @property
    def grid(self) -> ScaleGrid:
        return ScaleGrid(self.rho_min, self.rho_max, self.rho_ratio)


# ------------------------------------------------------------------ I/O

def _read_json(path: str | None):
    if path is None:
        raise UsageError("--in is required for this command")
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _load(path, loader):
    data = _read_json(path)
    try:
        return loader(data)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"malformed input {path}: {exc!r}") from None


def _table_rows(keys, values, N):
    """CSV rows: key, then real and imaginary parts of every blade."""
    header = ["key"] + [f"{p}_{blade_label(b)}" for b in range(1 << N) for p in ("re", "im")]
    rows = []
    for k, v in zip(keys, values):
        row = [k]
        for c in v:
            row += [repr(float(c.real)), repr(float(c.imag))]
        rows.append(row)
    return header, rows


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(cfg: RunConfig, payload: dict, table=None):
    """Write JSON, or CSV when a table is available; stdout if no --out."""
    if cfg.fmt == "csv":
        if table is None:
            raise UsageError(f"{cfg.command} has no CSV form")
        text = _csv_text(*table)
    else:
        text = json.dumps(payload, indent=1) + "\n"
    if cfg.out is None:
        sys.stdout.write(text)
        return
    try:
        Path(cfg.out).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {cfg.out}: {exc}") from None


def _signal_table(sig: SphereSignal):
    keys = [";".join(repr(float(x)) for x in p) for p in sig.nodes]
    return _table_rows(keys, sig.values, sig.m + 1)


def _coeff_table(c: SpectralCoefficients):
    return _table_rows(c.keys, c.values, c.m + 1)


def _wavelet_table(Wf: WaveletCoefficients):
    keys, vals = [], []
    blocks = [(str(j), a) for j, a in enumerate(Wf.scales)] + [("fine", Wf.fine), ("coarse", Wf.coarse)]
    for name, arr in blocks:
        keys += [f"{name}|{k}" for k in Wf.keys]
        vals += list(arr)
    return _table_rows(keys, vals, Wf.m + 1)


def example_signal_path() -> str:
    return str(resources.files("cliffwave") / "data" / EXAMPLE_SIGNAL)


# ------------------------------------------------------------- helpers

def _transform(cfg: RunConfig, m: int, K: int) -> SphereTransform:
    from .sphere import build_quadrature

    try:
        rule = build_quadrature(m, 2 * K + 2, max_nodes=cfg.max_nodes)
    except MemoryError as exc:
        raise UsageError(f"resource cap: {exc}") from None
    return SphereTransform(build_basis(m, K), rule)


def _check_nodes(sig: SphereSignal, tr: SphereTransform):
    nodes = tr.rule.nodes
    if sig.nodes.shape != nodes.shape or not np.allclose(sig.nodes, nodes, atol=1e-12):
        raise UsageError(
            f"signal is not sampled on the quadrature grid for m={tr.basis.m}, K={tr.basis.K} "
            f"({len(sig.nodes)} nodes given, {len(nodes)} expected)"
        )


def _signal_and_transform(cfg: RunConfig, default_K: int):
    sig = _load(cfg.inp, SphereSignal.from_json)
    tr = _transform(cfg, sig.m, cfg.degree(default_K))
    _check_nodes(sig, tr)
    return sig, tr


# ------------------------------------------------------------- commands

def cmd_basis(cfg: RunConfig) -> int:
    K = cfg.degree(4)
    basis = build_basis(cfg.m, K)
    data = basis.to_json()
    table = _table_rows(
        [f"{b.key}|{';'.join(map(str, e))}" for b in basis.elements for e in b.exps],
        [c for b in basis.elements for c in b.coeffs],
        basis.N,
    )
    _emit(cfg, data, table)
    for row in data["dimensions"]:
        log.info("k=%d  dim V=%d  dim W=%d", row["k"], row["V"], row["W"])
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import VerifyConfig, run_battery

    M = cfg.m if cfg.m > 2 else 4
    vc = VerifyConfig(
        sphere_dims=tuple(range(2, M)),
        sphere_degree=cfg.degree(5),
        n_max=M,
        spin_dims=tuple(range(3, M + 1)),
        casimir_c=None if cfg.casimir_c is None else Fraction(cfg.casimir_c),
        seed=cfg.seed,
    )
    report = run_battery(vc)
    _emit(cfg, report.to_json())
    for c in report.failures():
        print(f"FAILED [{c.section}] {c.name}: expected {c.expected}, got {c.actual}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_analyze(cfg: RunConfig) -> int:
    sig, tr = _signal_and_transform(cfg, 8)
    c = tr.analyze(sig)
    _emit(cfg, c.to_json(), _coeff_table(c))
    return EXIT_OK


def cmd_synthesize(cfg: RunConfig) -> int:
    c = _load(cfg.inp, SpectralCoefficients.from_json)
    K = max((int(k.split("/")[0]) for k in c.keys), default=0)
    tr = _transform(cfg, c.m, cfg.degree(K))
    try:
        sig = tr.synthesize(c)
    except ValueError as exc:
        raise InputError(f"band violation: {exc}") from None
    _emit(cfg, sig.to_json(), _signal_table(sig))
    return EXIT_OK


def cmd_heat(cfg: RunConfig) -> int:
    """Heat kernel coefficients, or the evolved signal when --in is given."""
    if cfg.inp is None:
        basis = build_basis(cfg.m, cfg.degree(8))
        p = heat_kernel(SpectralProfile(cfg.profile, cfg.m), cfg.t, basis)
        _emit(cfg, p.to_json(), _coeff_table(p))
        return EXIT_OK
    sig, tr = _signal_and_transform(cfg, 8)
    p = heat_kernel(SpectralProfile(cfg.profile, sig.m), cfg.t, tr.basis)
    out = tr.synthesize(sphere_convolution(tr.analyze(sig), p))
    _emit(cfg, out.to_json(), _signal_table(out))
    return EXIT_OK


def cmd_wavelet(cfg: RunConfig) -> int:
    if cfg.mode == "reconstruct":
        Wf = _load(cfg.inp, WaveletCoefficients.from_json)
        tr = _transform(cfg, Wf.m, cfg.degree(max(int(k.split("/")[0]) for k in Wf.keys)))
        if Wf.profile != cfg.profile:
            raise UsageError(f"coefficients use profile {Wf.profile}, --profile is {cfg.profile}")
        fam = wavelet_family(SpectralProfile(cfg.profile, Wf.m), cfg.grid, tr.basis)
        if Wf.family_id != fam.fingerprint():
            print("refused: wavelet family fingerprint does not match --profile/--rho-* settings", file=sys.stderr)
            return EXIT_USAGE
        fhat = wavelet_reconstruct(Wf, fam, cfg.exact_scales)
        sig = tr.synthesize(fhat)
        _emit(cfg, sig.to_json(), _signal_table(sig))
        return EXIT_OK

    if cfg.inp is None and cfg.mode == "roundtrip":
        cfg.inp = example_signal_path()
    sig, tr = _signal_and_transform(cfg, 8)
    fam = wavelet_family(SpectralProfile(cfg.profile, sig.m), cfg.grid, tr.basis)
    fhat = tr.analyze(sig)
    Wf = wavelet_transform(fhat, fam, tr.basis.keys, sig.m)
    if cfg.mode == "transform":
        _emit(cfg, Wf.to_json(), _wavelet_table(Wf))
        return EXIT_OK

    rec = tr.synthesize(wavelet_reconstruct(Wf, fam, cfg.exact_scales))
    ref = tr.norm(sig)
    err = tr.norm(rec.values - sig.values) / ref if ref > 0 else tr.norm(rec.values)
    tol = cfg.tolerance(1e-10 if cfg.exact_scales else 1e-3)
    ok = err <= tol
    report = {"relative_l2_error": err, "tol": tol, "ok": ok, "family": fam.fingerprint(), "scales": len(fam.rhos)}
    print(f"relative L2 error {err:.3e} (tol {tol:.1e})")
    if cfg.out is not None:
        _emit(cfg, report)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_spin_eig(cfg: RunConfig) -> int:
    from .poly import eigenvalue
    from .spinwave import delta_spin_H, delta_spin_L, enumerate_spin_modes

    m = cfg.m if cfg.m > 2 else 3
    bound = cfg.degree(4)
    if bound > 6:
        raise UsageError("spin-eig supports --max-degree up to 6")
    modes = enumerate_spin_modes(m, bound, verify=False)
    rows, ok = [], True
    for md in modes:
        op = delta_spin_H if md.kind == "H" else delta_spin_L
        actual = eigenvalue(op(md.poly), md.poly)
        good = actual == md.eigenvalue
        ok &= good
        rows.append(
            {
                "kind": md.kind,
                "weight": [str(x) for x in md.weight.entries],
                "degrees": list(md.degrees),
                "eigenvalue": str(md.eigenvalue),
                "symbolic": str(actual),
                "ok": good,
            }
        )
    header = ["kind", "weight", "degrees", "eigenvalue", "symbolic", "ok"]
    table = (header, [[r["kind"], " ".join(r["weight"]), " ".join(map(str, r["degrees"])), r["eigenvalue"], r["symbolic"], r["ok"]] for r in rows])
    _emit(cfg, {"m": m, "bound": bound, "modes": rows}, table)
    return EXIT_OK if ok else EXIT_FAIL


HANDLERS = {
    "basis": cmd_basis,
    "verify": cmd_verify,
    "analyze": cmd_analyze,
    "synthesize": cmd_synthesize,
    "heat": cmd_heat,
    "wavelet": cmd_wavelet,
    "spin-eig": cmd_spin_eig,
}


# -------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--m", type=int, default=2, help="sphere dimension S^m; for verify and spin-eig the largest algebra dimension (default: %(default)s)")
    g.add_argument("--max-degree", dest="K", type=int, default=None, help="band limit K (default: 4 for basis, 5 for verify, 8 otherwise)")
    g.add_argument("--profile", choices=PROFILES, default="heat-h", help="spectral profile (default: %(default)s)")
    g.add_argument("--rho-min", type=float, default=1e-3, help="smallest wavelet scale (default: %(default)s)")
    g.add_argument("--rho-max", type=float, default=20.0, help="largest wavelet scale (default: %(default)s)")
    g.add_argument("--rho-ratio", type=float, default=1.05, help="geometric scale ratio (default: %(default)s)")
    g.add_argument("--t", type=float, default=0.1, help="diffusion time (default: %(default)s)")
    g.add_argument("--in", dest="inp", default=None, help="input file")
    g.add_argument("--out", default=None, help="output file (default: stdout)")
    g.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json", help="output format (default: %(default)s)")
    g.add_argument("--tol", type=float, default=None, help="tolerance override (default: 1e-3 for roundtrip, 1e-10 with --exact-scales)")
    g.add_argument("--seed", type=int, default=0, help="RNG seed (default: %(default)s)")
    g.add_argument("--max-nodes", type=int, default=2_000_000, help="quadrature size cap (default: %(default)s)")
    g.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="cliffwave", description="Clifford-valued diffusive wavelets on spheres and Spin(m).")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("basis", parents=[common], help="orthonormal spherical monogenic basis")
    v = sub.add_parser("verify", parents=[common], help="symbolic eigenvalue and identity battery")
    v.add_argument("--casimir-c", default=None, help="override the constant in L = H + Gamma - c (negative control)")
    sub.add_parser("analyze", parents=[common], help="signal -> spectral coefficients")
    sub.add_parser("synthesize", parents=[common], help="spectral coefficients -> signal")
    sub.add_parser("heat", parents=[common], help="heat kernel, or heat evolution of --in")
    w = sub.add_parser("wavelet", parents=[common], help="diffusive wavelet transform")
    w.add_argument("mode", choices=WAVELET_MODES, nargs="?", default="roundtrip")
    w.add_argument("--exact-scales", action="store_true", help="use the closed-form scale integral")
    sub.add_parser("spin-eig", parents=[common], help="Spin(m) eigenfunctions with symbolic eigenvalues")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fields = set(RunConfig.__dataclass_fields__)
    return RunConfig(**{k: v for k, v in vars(ns).items() if k in fields}).validate()


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = config_from_args(ns)
        log.info("config: %s", asdict(cfg))
        return HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
