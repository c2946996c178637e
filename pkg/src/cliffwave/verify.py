"""Symbolic eigenvalue and identity battery, run on the exact backend."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .poly import (
    VarSystem,
    Weight,
    casimir_constant,
    casimir_H,
    casimir_H_eigenvalue,
    casimir_L,
    casimir_L_assembled,
    casimir_L_eigenvalue,
    dominant_weights,
    eigenvalue,
    gamma,
    gamma_quadratic,
    highest_weight_vector,
    inner_variables,
    is_harmonic,
    is_monogenic,
    is_simplicial,
    mixed_dirac_inner,
    mixed_laplacian,
    overdot_form,
    random_polynomial,
    sum_l_squared,
)
from .sphere import raw_basis

SECTIONS = ("gamma", "laplace", "casimir", "identities", "simplicial", "mixed_laplacian", "spin")


@dataclass
class VerifyConfig:
    sphere_dims: tuple = (2, 3)
    sphere_degree: int = 5
    n_max: int = 4
    weight_total: int = 6
    spin_dims: tuple = (3, 4)
    spin_bound: int = 4
    random_trials: int = 3
    random_degree: int = 4
    casimir_c: Fraction | None = None
    seed: int = 0


@dataclass
class Check:
    section: str
    name: str
    expected: str
    actual: str
    ok: bool


@dataclass
class Report:
    checks: list = field(default_factory=list)

    def add(self, section, name, expected, actual, ok=None):
        ok = expected == actual if ok is None else ok
        self.checks.append(Check(section, name, str(expected), str(actual), bool(ok)))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]

    def to_json(self) -> dict:
        sections = {s: [asdict(c) for c in self.checks if c.section == s] for s in SECTIONS}
        return {
            "ok": self.ok,
            "n_checks": len(self.checks),
            "n_failed": len(self.failures()),
            "sections": sections,
        }


def _sphere_expected(k, m, part):
    if part == "V":
        return -k, -k * (k + m - 1)
    return k + m, -(k + 1) * (k + m)


def sphere_checks(report: Report, cfg: VerifyConfig):
    """Gamma and Laplace-Beltrami eigenvalues on the raw spherical monogenics.

    The stored orthonormal elements are right-module combinations of these,
    and both operators act from the left, so the eigenvalues carry over.
    """
    for m in cfg.sphere_dims:
        for k in range(cfg.sphere_degree + 1):
            for part in ("V", "W"):
                alphas, polys = raw_basis(m, k, part)
                eg, ed = _sphere_expected(k, m, part)
                for a, p in zip(alphas, polys):
                    name = f"m={m} {k}/{','.join(map(str, a))}/{part}"
                    report.add("gamma", name, eg, eigenvalue(gamma(p, 0), p))
                    report.add("laplace", name, ed, eigenvalue(casimir_H(p), p))


def _weights(cfg):
    for n in range(3, cfg.n_max + 1):
        for kind in ("harmonic", "monogenic"):
            for w in dominant_weights(n, cfg.weight_total, kind):
                yield n, kind, w


def casimir_checks(report: Report, cfg: VerifyConfig):
    for n, kind, w in _weights(cfg):
        p = highest_weight_vector(w, n)
        name = f"n={n} {kind} {w.entries}"
        if kind == "harmonic":
            report.add("casimir", "H " + name, casimir_H_eigenvalue(w, n), eigenvalue(casimir_H(p), p))
        else:
            report.add("casimir", "L " + name, casimir_L_eigenvalue(w, n), eigenvalue(casimir_L(p), p))
        report.add("simplicial", name, True, is_simplicial(p))
        pred = is_harmonic if kind == "harmonic" else is_monogenic
        report.add("simplicial", f"{kind} {name}", True, pred(p))
        for i in range(p.vs.k):
            for j in range(i + 1, p.vs.k):
                d = p.degree(j)
                ev = eigenvalue(mixed_laplacian(p, i, j), p) if p.terms else None
                report.add("mixed_laplacian", f"Delta_{i}{j} {name}", d, ev)


def identity_checks(report: Report, cfg: VerifyConfig):
    rng = np.random.default_rng(cfg.seed)
    for n in range(3, cfg.n_max + 1):
        c = casimir_constant(n) if cfg.casimir_c is None else Fraction(cfg.casimir_c)
        for t in range(cfg.random_trials):
            vs = VarSystem(2, n)
            p = random_polynomial(vs, n, rng, degree=cfg.random_degree)
            ok = casimir_L(p) == casimir_L_assembled(p, c)
            report.add("casimir", f"L = H + Gamma - c, n={n} trial {t} (c={c})", True, ok)
            ok = sum_l_squared(p, 0) == gamma_quadratic(p, 0)
            report.add("identities", f"sum L^2 = Gamma(n-2-Gamma), n={n} trial {t}", True, ok)
            lhs = mixed_laplacian(p, 0, 1) - overdot_form(p, 0, 1)
            ok = lhs == inner_variables(p, 0, 1) * mixed_dirac_inner(p, 0, 1)
            report.add("mixed_laplacian", f"overdot form mod <u,v>, n={n} trial {t}", True, ok)


def spin_checks(report: Report, cfg: VerifyConfig):
    from .spinwave import (
        delta_spin_H,
        delta_spin_L,
        enumerate_spin_modes,
        spin_dirac_at_identity,
        spin_dirac_formula,
    )

    for m in cfg.spin_dims:
        modes = enumerate_spin_modes(m, cfg.spin_bound, verify=False)
        for md in modes:
            op = delta_spin_H if md.kind == "H" else delta_spin_L
            report.add("spin", f"m={m} Delta_Spin {md.label}", md.eigenvalue, eigenvalue(op(md.poly), md.poly))
        hs = [md for md in modes if md.kind == "H"]
        ls = [md for md in modes if md.kind == "L"]
        for h in hs:
            alpha = _pad_variables(h, m)
            for lm in ls:
                ok = spin_dirac_at_identity(alpha, lm.poly) == spin_dirac_formula(alpha, lm.poly)
                report.add("spin", f"m={m} Dirac ({h.label}, {lm.label})", True, ok)


def _pad_variables(mode, m):
    """Re-express a harmonic mode in the m//2 frame variables of the L-modes."""
    r = m // 2
    tw = tuple(mode.weight.twice) + (0,) * (r - len(mode.weight.twice))
    return highest_weight_vector(Weight(tw), m)


def run_battery(cfg: VerifyConfig | None = None, sections=SECTIONS) -> Report:
    cfg = cfg or VerifyConfig()
    report = Report()
    if "gamma" in sections or "laplace" in sections:
        sphere_checks(report, cfg)
    if {"casimir", "simplicial", "mixed_laplacian"} & set(sections):
        casimir_checks(report, cfg)
        identity_checks(report, cfg)
    if "spin" in sections:
        spin_checks(report, cfg)
    return report


__all__ = ["SECTIONS", "VerifyConfig", "Check", "Report", "run_battery"]
