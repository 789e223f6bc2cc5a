"""Seeded property suites that check every certified inequality and identity.

Each case draws its randomness from ``SeedSequence([seed, suite, dim, trial])``,
so a run is a pure function of its configuration.  Failures, including raised
library errors, are recorded as rows with ``verdict=False``.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator

import numpy as np

from gfusion._tolerance import TOL_RECON
from gfusion.duals import canonical_dual, reconstruct, transported_dual, verify_dual_operator
from gfusion.errors import GFusionError
from gfusion.frames import (
    BoundCertificate,
    CertificateKind,
    DirectSumVector,
    optimal_bounds,
    optimal_k_lower_bound,
    quadratic_form,
    synthesis_matrix,
    verify_certificate,
)
from gfusion.linalg import operator_norm, orthonormal_basis, projection_identity_check
from gfusion.quotient import quotient_equivalence_report
from gfusion.stability import dual_stability_report, mixed_synthesis_check
from gfusion.tooling.generate import (
    Profile,
    complex_gaussian,
    perturbed_family,
    random_family,
    random_invertible,
    random_subspace,
    random_unitary,
)
from gfusion.transforms import (
    conjugate_transform,
    conjugated_family,
    k_dual_transform,
    member_map_transform,
    projected_dual_transform,
    pull_back_transform,
)

__all__ = ["SUITES", "CaseResult", "CertificationRun", "run_certification", "emit_report"]

SUITES = ("definitions", "transforms", "duals", "stability", "quotient")
CHECK_TOL = 1e-8


@dataclass(frozen=True)
class CaseResult:
    case_id: str
    theorem_tag: str
    verdict: bool
    residual: float
    elapsed: float = 0.0
    detail: str = ""


@dataclass(frozen=True)
class CertificationRun:
    suite: str
    seed: int
    dims: tuple
    trials: int
    results: tuple = field(default=())

    def __post_init__(self):
        if self.suite != "all" and self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @property
    def passed(self) -> int:
        return sum(r.verdict for r in self.results)

    @property
    def failed(self) -> int:
        return len(self.results) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0


def _margin_residual(cert):
    worst = min(m for m in cert.margins if m is not None)
    return max(0.0, -worst) / (1.0 + abs(cert.upper))


def _family(rng, dim, profile=Profile.WELL_CONDITIONED):
    members = int(rng.integers(3, min(16, 2 * dim + 2) + 1))
    return random_family(int(rng.integers(2**63)), dim, members, spectrum_profile=profile)


def _f(rng, dim):
    return complex_gaussian(rng, dim)


# each suite yields (tag, variant, check) where check() -> (verdict, residual[, detail])
Check = Callable[[], tuple]


def _definitions(rng, dim) -> Iterator[tuple[str, str, Check]]:
    fam = _family(rng, dim)
    fs = [_f(rng, dim) for _ in range(10)]
    T = random_invertible(rng, dim)
    V = random_subspace(rng, dim, int(rng.integers(1, dim + 1)))
    W = random_unitary(rng, dim)

    def frame_operator():
        S = fam.frame_operator.array
        Tl = synthesis_matrix(fam)
        scale = 1.0 + operator_norm(S)
        res = operator_norm(S - Tl @ Tl.conj().T) / scale
        for f in fs:
            q = float(np.vdot(f, S @ f).real)
            res = max(res, abs(quadratic_form(fam, f) - q) / max(abs(q), 1e-300))
        return res <= 1e-9, res

    def projection():
        chk = projection_identity_check(T, V)
        return chk.residual <= 1e-10, chk.residual

    def projection_unitary():
        chk = projection_identity_check(W, V)
        if chk.unitary_variant is None:
            return False, math.inf
        r = max(chk.residual, chk.unitary_variant[1])
        return r <= 1e-10, r

    def bessel_norm():
        B = optimal_bounds(fam).upper
        t2 = np.linalg.norm(synthesis_matrix(fam), 2) ** 2
        res = abs(B - t2) / B
        return res <= CHECK_TOL, res

    yield "eq_1_1", "", frame_operator
    yield "thm_2_1", "", projection
    yield "thm_2_1_unitary", "", projection_unitary
    yield "thm_2_9", "", bessel_norm


def _transforms(rng, dim):
    fam = _family(rng, dim)
    U = random_invertible(rng, dim)
    K = random_invertible(rng, dim)
    K_dual = random_invertible(rng, dim)
    V = random_subspace(rng, dim, int(rng.integers(1, dim + 1)))
    T = random_invertible(rng, dim)
    maps = [random_invertible(rng, c) for c in fam.codomain_dims]
    a, b = rng.uniform(0.5, 2.0, 2)
    K_comm = a * np.eye(dim) + b * T if dim > 1 else np.eye(dim)
    B = optimal_bounds(fam).upper

    def k_bounds(family, k):
        return optimal_k_lower_bound(family, k), optimal_bounds(family).upper

    def conjugate():
        r = conjugate_transform(fam, U, K, k_bounds(fam, K))
        return r.guaranteed.verdict, _margin_residual(r.guaranteed)

    def pull_back():
        moved = conjugated_family(fam, U)
        r = pull_back_transform(moved, fam, U, K, k_bounds(moved, K))
        return r.guaranteed.verdict, _margin_residual(r.guaranteed)

    def k_dual():
        r = k_dual_transform(fam, K_dual)
        res = max(r.checks["operator_identity"], _margin_residual(r.guaranteed))
        return r.guaranteed.verdict and r.checks["operator_identity"] <= CHECK_TOL, res

    def projected():
        r = projected_dual_transform(fam, V)
        opt = r.checks["optimal_lower"]
        res = max(r.checks["operator_identity"], _margin_residual(r.guaranteed))
        ok = r.guaranteed.verdict and opt is not None and r.checks["operator_identity"] <= CHECK_TOL
        return ok, res

    def member_maps():
        r = member_map_transform(fam, T, maps, K_comm, (optimal_k_lower_bound(fam, K_comm), B))
        res = max(r.checks["assembly_identity"], _margin_residual(r.guaranteed))
        return r.guaranteed.verdict and r.checks["assembly_identity"] <= CHECK_TOL, res

    yield "thm_3_1", "", conjugate
    yield "thm_3_2", "", pull_back
    yield "thm_3_3", "", k_dual
    yield "cor_3_4", "", projected
    yield "thm_3_5", "", member_maps


def _duals(rng, dim):
    fam = _family(rng, dim)
    T = random_invertible(rng, dim)
    maps = [random_invertible(rng, c) for c in fam.codomain_dims]
    fs = [_f(rng, dim) for _ in range(10)]

    def canonical():
        pair = canonical_dual(fam)
        chk = verify_dual_operator(pair)
        A, B, _ = optimal_bounds(fam)
        dA, dB, _ = optimal_bounds(pair.dual)
        res = max(chk.residual, abs(dA - 1 / B) * B, abs(dB - 1 / A) * A)
        return res <= CHECK_TOL, res

    def transported():
        pair = transported_dual(fam, T, maps)
        res = max(max(reconstruct(pair, f).residuals) for f in fs)
        checks_ok = all(c[2] for c in pair.checks.values())
        return res <= CHECK_TOL and checks_ok, res

    yield "eq_3_1", "", canonical
    yield "thm_3_8", "", transported


def _stability(rng, dim):
    lhs = _family(rng, dim)
    rhs = perturbed_family(rng, lhs, 10.0 ** rng.uniform(-3.0, -1.5))
    gs = [
        DirectSumVector(tuple(complex_gaussian(rng, c) for c in lhs.codomain_dims))
        for _ in range(20)
    ]
    cache = {}

    def report():
        if "r" not in cache:
            cache["r"] = dual_stability_report(lhs, rhs)
        return cache["r"]

    def mixed():
        worst = 0.0
        ok = True
        for g in gs:
            chk = mixed_synthesis_check(lhs, rhs, g)
            ok &= chk.holds
            worst = max(worst, chk.norm / chk.bound if chk.bound > 0 else 0.0)
        return ok, worst

    def gap_I():
        r = report()
        ok = r.verdicts["dual_gap"] and r.verdicts["frame_operator"]
        return ok, r.dual_gap / r.bound_422_I if r.bound_422_I > 0 else 0.0

    def gap_II():
        r = report()
        return r.verdicts["dual_quadratic_form"], r.inverse_distance / r.bound_422_II

    def operator_gap():
        r = report()
        return r.verdicts["dual_operator"], r.dual_operator_distance / r.bound_422_II

    yield "thm_4_1", "", mixed
    yield "thm_4_2_I", "", gap_I
    yield "thm_4_2_II", "", gap_II
    yield "rem_4_3", "", operator_gap


QUOTIENT_VARIANTS = ("full_rank", "rank_deficient", "bessel_only", "bessel_only_range")


def _quotient(rng, dim, trial):
    variant = QUOTIENT_VARIANTS[trial % len(QUOTIENT_VARIANTS)]
    if variant.startswith("bessel_only") and dim < 2:
        variant = "full_rank"
    profile = Profile.FORCED_BESSEL_ONLY if variant.startswith("bessel_only") else Profile.WELL_CONDITIONED
    fam = _family(rng, dim, profile)
    U = random_invertible(rng, dim)
    if variant == "full_rank":
        K = random_invertible(rng, dim)
    elif variant == "rank_deficient":
        r = int(rng.integers(0, dim))
        K = complex_gaussian(rng, dim, r) @ complex_gaussian(rng, r, dim)
    elif variant == "bessel_only":
        K = random_invertible(rng, dim)
    else:
        # K maps into range(S), so the K-frame conditions hold again
        vals, vecs = fam.frame_operator.matrix.eig
        R = vecs[:, vals > 1e-8 * vals[-1]]
        K = R @ complex_gaussian(rng, R.shape[1], dim)
    cache = {}

    def report():
        if "r" not in cache:
            cache["r"] = quotient_equivalence_report(fam, K, U)
        return cache["r"]

    def conditions():
        r = report()
        detail = "I={} II={} III={}".format(*(int(c[0]) for c in (r.cond_I, r.cond_II, r.cond_III)))
        return r.consistent, 0.0 if r.consistent else 1.0, detail

    def bridge():
        r = report()
        if r.bridge_lower_bound is None or not r.cond_I[0]:
            return True, 0.0, "no positive bound"
        moved = conjugated_family(fam, U)
        cert = BoundCertificate(
            CertificateKind.K_FRAME, optimal_bounds(moved).upper, r.bridge_lower_bound, U @ K
        )
        cert = verify_certificate(moved, cert, CHECK_TOL)
        return cert.verdict, _margin_residual(cert), ""

    yield "thm_4_5", variant, conditions
    yield "thm_4_5_bridge", variant, bridge


def _cases(suite, rng, dim, trial):
    if suite == "quotient":
        return _quotient(rng, dim, trial)
    return {"definitions": _definitions, "transforms": _transforms, "duals": _duals,
            "stability": _stability}[suite](rng, dim)


def _run_suite(suite, seed, dims, trials) -> list[CaseResult]:
    idx = SUITES.index(suite)
    rows = []
    for dim in dims:
        for trial in range(trials):
            rng = np.random.default_rng(np.random.SeedSequence([int(seed), idx, dim, trial]))
            prefix = f"{suite}/d{dim:03d}/t{trial:05d}"
            start = time.perf_counter()
            try:
                cases = list(_cases(suite, rng, dim, trial))
            except GFusionError as exc:
                rows.append(CaseResult(f"{prefix}/setup", "setup", False, math.inf,
                                       time.perf_counter() - start, type(exc).__name__))
                continue
            for tag, variant, check in cases:
                start = time.perf_counter()
                try:
                    out = check()
                except GFusionError as exc:
                    out = (False, math.inf, f"{type(exc).__name__}: {exc}")
                verdict, residual = bool(out[0]), float(out[1])
                detail = out[2] if len(out) > 2 else ""
                case_id = f"{prefix}/{tag}" + (f"/{variant}" if variant else "")
                rows.append(CaseResult(case_id, tag, verdict, residual,
                                       time.perf_counter() - start, detail))
    return rows


def run_certification(config: CertificationRun) -> CertificationRun:
    suites = SUITES if config.suite == "all" else (config.suite,)
    rows = []
    for suite in suites:
        rows.extend(_run_suite(suite, config.seed, config.dims, config.trials))
    rows.sort(key=lambda r: r.case_id)
    return replace(config, results=tuple(rows))


def _json_float(x):
    return x if math.isfinite(x) else None


def emit_report(run: CertificationRun, format="machine") -> str:
    """Line-delimited JSON records, or an aligned table with failures first."""
    if format == "machine":
        return "".join(
            json.dumps(
                {
                    "case_id": r.case_id,
                    "theorem_tag": r.theorem_tag,
                    "verdict": r.verdict,
                    "residual": _json_float(r.residual),
                    "elapsed_ms": r.elapsed * 1e3,
                }
            )
            + "\n"
            for r in run.results
        )
    if format != "human":
        raise ValueError(f"unknown report format {format!r}")
    rows = sorted(run.results, key=lambda r: (r.verdict, r.case_id))
    table = [("case_id", "theorem_tag", "verdict", "residual", "elapsed_ms", "detail")]
    table += [
        (r.case_id, r.theorem_tag, "pass" if r.verdict else "FAIL", f"{r.residual:.3e}",
         f"{r.elapsed * 1e3:.2f}", r.detail)
        for r in rows
    ]
    widths = [max(len(row[i]) for row in table) for i in range(len(table[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in table]
    lines.append(f"{run.passed} passed / {run.failed} failed")
    return "\n".join(lines) + "\n"
