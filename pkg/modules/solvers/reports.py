"""SolveReport and its JSON/CSV persistence."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import List, Optional

from modules.model.functionals import (
    compute_masses,
    energy_I,
    lagrange_lambda,
    multiplier_balance_relative,
    pohozaev_residual,
)
from modules.model.gradient import el_residual
from modules.model.params import ModelParams
from modules.radial_tools.grid import RadialField
from modules.radial_tools.profile_io import read_profile_csv, write_profile_csv

REPORT_FILE = "report.json"
PROFILE_FILE = "profile.csv"
POHOZAEV_GATE = 1e-6
EL_GATE = 1e-3


@dataclass
class SolveReport:
    """A converged (or best) profile with its energy, multiplier and diagnostics."""
    profile: RadialField
    energy: float
    pohozaev_residual: float
    lam: float
    mass: float
    mu_schedule_used: List[float]
    iterations_total: int
    converged: bool
    node_count: int = 0
    el_residual: float = float("nan")
    multiplier_balance: float = float("nan")
    seed_label: str = ""
    method: str = "descent+fiber"
    N: int = 0
    p: float = 0.0
    a: float = 0.0
    theta: Optional[float] = None
    stage_energies: List[float] = field(default_factory=list)
    profile_path: Optional[str] = None
    extras: dict = field(default_factory=dict)

    @classmethod
    def evaluate(cls, u: RadialField, params: ModelParams, pohozaev_gate: float = POHOZAEV_GATE,
                 **extra) -> "SolveReport":
        """Build a report by evaluating every diagnostic of u at mu = 0."""
        base = params.with_mu(0.0)
        m = compute_masses(u, base)
        lam = lagrange_lambda(m, base)
        poh = pohozaev_residual(m, base)
        el = el_residual(u, lam, base)
        extra.setdefault("converged", poh <= pohozaev_gate and el <= EL_GATE)
        extra.setdefault("mu_schedule_used", [])
        extra.setdefault("iterations_total", 0)
        return cls(
            profile=u,
            energy=energy_I(m, base),
            pohozaev_residual=poh,
            lam=lam,
            mass=m.M,
            el_residual=el,
            multiplier_balance=multiplier_balance_relative(m, base),
            N=params.N,
            p=params.p,
            a=params.a,
            theta=params.theta,
            **extra,
        )

    @property
    def params(self) -> ModelParams:
        return ModelParams(N=self.N, p=self.p, a=self.a, theta=self.theta)

    def to_dict(self) -> dict:
        """JSON payload; the profile itself travels as a CSV next to the report."""
        return {
            "profile_path": self.profile_path,
            "energy": self.energy,
            "pohozaev_residual": self.pohozaev_residual,
            "lambda": self.lam,
            "mass": self.mass,
            "mu_schedule_used": list(self.mu_schedule_used),
            "iterations_total": int(self.iterations_total),
            "converged": bool(self.converged),
            "node_count": int(self.node_count),
            "el_residual": self.el_residual,
            "multiplier_balance": self.multiplier_balance,
            "seed_label": self.seed_label,
            "method": self.method,
            "N": self.N,
            "p": self.p,
            "a": self.a,
            "theta": self.theta,
            "stage_energies": list(self.stage_energies),
            "extras": dict(self.extras),
        }

    def save(self, output_dir, stem: str = "") -> str:
        """Write <stem>report.json and <stem>profile.csv into output_dir; returns the report path."""
        os.makedirs(output_dir, exist_ok=True)
        profile_name = f"{stem}{PROFILE_FILE}"
        write_profile_csv(self.profile, os.path.join(output_dir, profile_name))
        self.profile_path = profile_name
        report_path = os.path.join(output_dir, f"{stem}{REPORT_FILE}")
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
        return report_path


def load_report(path) -> SolveReport:
    """Reload a saved report together with its profile."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    profile_path = os.path.join(os.path.dirname(os.path.abspath(path)), payload["profile_path"])
    profile = read_profile_csv(profile_path, int(payload["N"]))
    return SolveReport(
        profile=profile,
        energy=payload["energy"],
        pohozaev_residual=payload["pohozaev_residual"],
        lam=payload["lambda"],
        mass=payload["mass"],
        mu_schedule_used=payload["mu_schedule_used"],
        iterations_total=payload["iterations_total"],
        converged=payload["converged"],
        node_count=payload.get("node_count", 0),
        el_residual=payload.get("el_residual", float("nan")),
        multiplier_balance=payload.get("multiplier_balance", float("nan")),
        seed_label=payload.get("seed_label", ""),
        method=payload.get("method", ""),
        N=int(payload["N"]),
        p=payload["p"],
        a=payload["a"],
        theta=payload.get("theta"),
        stage_energies=payload.get("stage_energies", []),
        profile_path=payload["profile_path"],
        extras=payload.get("extras", {}),
    )
