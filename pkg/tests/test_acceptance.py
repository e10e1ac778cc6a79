"""End-to-end acceptance criteria.

Each criterion runs at its stated tolerance and runtime budget.  A one-line
PASS/FAIL verdict per criterion is printed in the terminal summary (see
``conftest.py``) and when this file is executed directly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
import pytest

from toeplitz_gbz import (
    ConfluentModeError,
    GeneralisedBrillouinZone,
    OnBoundaryError,
    SpectralTag,
    SymbolCoefficients,
    circulant_matrix,
    classify,
    decay_rate,
    eig_dense,
    ellipse_geometry,
    evaluate,
    finite_obc_spectrum,
    hausdorff_distance,
    laurent_spectrum_sample,
    locate_quasiperiodicities,
    matching_distance,
    obc_limit_set,
    pbc_limit_sample,
    pbc_spectrum,
    prototype_symbol,
    psi,
    quasiperiodic_extension,
    smallest_singular_value,
    symbolic_eigenvector,
    toeplitz_matrix,
    winding_number,
)
from toeplitz_gbz.gbz import alpha_grid
from toeplitz_gbz.limits import curve_sampling_bound
from toeplitz_gbz.modes import decay_table
from toeplitz_gbz.sets import directed_distance
from toeplitz_gbz.symbol import angle_distance, membership_codes, reduce_angle

SEED = 20240601
PROTO = prototype_symbol()
HERMITIAN = SymbolCoefficients((0, 0), (1 + 1j, 2), (1 - 1j, 2))
RATIO = 200 / 9


@dataclass
class Verdict:
    passed: bool
    detail: str
    seconds: float


RESULTS: dict[str, Verdict] = {}

TITLES = {
    "C1": "non-reciprocity rate and shift",
    "C2": "ring spectrum equals block union",
    "C3": "open chain closed form",
    "C4": "quasiperiodicity round trip",
    "C5": "conjugate identity and nesting",
    "C6": "winding classification",
    "C7": "open-boundary convergence",
    "C8": "pseudospectral decay",
    "C9": "symbolic eigenvectors and decay",
    "C10": "Hermitian reduction",
    "C11": "boundary sensitivity",
}


def record(key: str, passed: bool, detail: str, seconds: float) -> None:
    prev = RESULTS.get(key)
    if prev is not None:
        passed = prev.passed and passed
        detail = f"{prev.detail}; {detail}"
        seconds += prev.seconds
    RESULTS[key] = Verdict(passed, detail, seconds)


def run_criterion(key: str, budget: float, body) -> None:
    """Run ``body`` (returning ``(ok, detail)``), enforce the runtime budget and record."""
    t0 = time.perf_counter()
    try:
        ok, detail = body()
    except Exception as exc:  # recorded, then re-raised for pytest
        record(key, False, f"{type(exc).__name__}: {exc}", time.perf_counter() - t0)
        raise
    elapsed = time.perf_counter() - t0
    in_time = elapsed < budget
    if not in_time:
        detail += f"; runtime {elapsed:.3g}s over budget {budget}s"
    record(key, ok and in_time, detail, elapsed)
    assert ok, detail
    assert in_time, detail


def summary_lines() -> list[str]:
    lines = []
    for key in TITLES:
        v = RESULTS.get(key)
        if v is None:
            lines.append(f"{key:>4} NOT RUN  {TITLES[key]}")
        else:
            verdict = "PASS" if v.passed else "FAIL"
            lines.append(f"{key:>4} {verdict}  {TITLES[key]} ({v.seconds:.2f}s): {v.detail}")
    return lines


# ---------------------------------------------------------------- criteria


def test_c1_nonreciprocity_rate():
    ellipse_geometry(PROTO)  # warm caches before timing

    def body():
        best = min(_timed(lambda: ellipse_geometry(PROTO)) for _ in range(20))
        e = ellipse_geometry(PROTO)
        d_err = abs(e.delta - math.log(RATIO))
        z_err = angle_distance(e.zeta, math.pi)
        ok = d_err <= 1e-12 and z_err <= 1e-12 and best < 1e-3
        return ok, f"|delta err|={d_err:.1e}, |zeta-pi| mod 2pi={z_err:.1e}, call {best * 1e6:.0f}us"

    run_criterion("C1", 1.0, body)


def _timed(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def test_c2_ring_block_union():
    def body():
        worst = 0.0
        for m in (4, 10, 50):
            dense = eig_dense(circulant_matrix(PROTO, m).matrix).eigenvalues
            worst = max(worst, matching_distance(dense, pbc_spectrum(PROTO, m).points))
        return worst < 1e-8, f"max matching distance {worst:.1e}"

    run_criterion("C2", 2.0, body)


def test_c3_open_chain_closed_form():
    s = SymbolCoefficients((0,), (2,), (0.5,))

    def body():
        n = 100
        pts = finite_obc_spectrum(s, n).points
        exact = 2 * np.cos(np.arange(1, n + 1) * np.pi / (n + 1))
        got = pts[np.argsort(pts.real)]
        err = float(np.max(np.abs(got - np.sort(exact))))
        return err < 1e-6, f"max elementwise error {err:.1e}"

    run_criterion("C3", 1.0, body)


def test_c4_quasiperiodicity_round_trip():
    e = ellipse_geometry(PROTO)

    def body():
        rng = np.random.default_rng(SEED)
        worst = worst_conj = worst_vieta = 0.0
        for _ in range(1000):
            alpha = rng.uniform(-np.pi, np.pi)
            beta = rng.uniform(0, e.delta / 2)
            lam = np.linalg.eigvals(evaluate(PROTO, np.exp(-1j * (alpha + 1j * beta))))[rng.integers(2)]
            q1, q2 = locate_quasiperiodicities(PROTO, lam)
            worst = max(worst, angle_distance(q1.alpha, alpha), abs(q1.beta - beta))
            worst_conj = max(
                worst_conj,
                angle_distance(q2.alpha, reduce_angle(-e.zeta - alpha)),
                abs(q2.beta - (e.delta - beta)),
            )
            worst_vieta = max(worst_vieta, abs(q1.z * q2.z + RATIO))
        ok = worst < 1e-8 and worst_conj < 1e-8 and worst_vieta < 1e-9 * RATIO
        return ok, (f"max err {worst:.1e}, conjugate {worst_conj:.1e}, "
                    f"Vieta {worst_vieta / RATIO:.1e} rel")

    run_criterion("C4", 5.0, body)


def test_c5_conjugate_identity_and_nesting():
    e = ellipse_geometry(PROTO)

    def body():
        rng = np.random.default_rng(SEED + 5)
        alpha = rng.uniform(-np.pi, np.pi, 1000)
        beta = rng.uniform(0, e.delta, 1000)
        z = np.exp(-1j * (alpha + 1j * beta))
        zc = np.exp(-1j * (reduce_angle(-e.zeta - alpha) + 1j * (e.delta - beta)))
        bound = 1e-10 * (e.A_plus * math.exp(e.delta) + e.A_minus)
        err = float(np.max(np.abs(psi(PROTO, z) - psi(PROTO, zc))))
        # nesting on a 32 x 8 grid: each level lies inside every lower level
        alphas = alpha_grid(32)
        betas = np.linspace(0, e.delta / 2, 8)
        nested = True
        for j, b2 in enumerate(betas):
            curve = psi(PROTO, np.exp(-1j * (alphas + 1j * b2)))
            for b1 in betas[:j]:
                nested &= bool(np.all(membership_codes(e, curve, b1) == 1))
        return err <= bound and nested, f"identity err {err:.1e} (bound {bound:.1e}), nested={nested}"

    run_criterion("C5", 1.0, body)


def test_c6_winding_classification():
    def body():
        w0, w3 = winding_number(PROTO, 0), winding_number(PROTO, 3)
        stable = winding_number(PROTO, 0, 512) == w0 and winding_number(PROTO, 3, 512) == w3
        rng = np.random.default_rng(SEED + 6)
        lams = rng.uniform(-3, 3, 500) + 1j * rng.uniform(-3, 3, 500)
        excluded = mismatched = 0
        for lam in lams:
            try:
                c = classify(PROTO, lam)
                if c.tag is SpectralTag.DET_BOUNDARY:
                    excluded += 1
                    continue
                w = winding_number(PROTO, lam)
            except OnBoundaryError:
                excluded += 1
                continue
            mismatched += (c.tag is SpectralTag.WINDING_INTERIOR) != (w != 0)
        ok = w0 == -1 and w3 == 0 and stable and mismatched == 0 and excluded < 5
        return ok, (f"winding(0)={w0}, winding(3)={w3}, stable={stable}, "
                    f"{mismatched} mismatches, {excluded}/500 excluded")

    run_criterion("C6", 5.0, body)


def test_c7_open_boundary_convergence_trend():
    def body():
        limit = obc_limit_set(PROTO, 4001)
        d = [directed_distance(finite_obc_spectrum(PROTO, m, via_collapse=True), limit)
             for m in (10, 50, 200)]
        ok = d[0] > d[1] > d[2] and d[2] < 5e-2
        return ok, "directed distances " + ", ".join(f"{x:.2e}" for x in d)

    run_criterion("C7", 30.0, body)


def test_c7_open_boundary_spectrum_purely_real():
    """The prototype's finite open spectrum is required to be real to 1e-8.

    It is not: b_2 c_2 = -0.1 < 0 makes the collapsed chain complex symmetric,
    and its spectrum approaches the limit curve lambda^2 = 1.7 - i t, which
    leaves the real axis (max |Im| ~ 0.32).  Kept as a faithful failure.
    """

    def body():
        worst = {m: float(np.max(np.abs(finite_obc_spectrum(PROTO, m, via_collapse=True).points.imag)))
                 for m in (10, 50, 200)}
        ok = all(v < 1e-8 for v in worst.values())
        return ok, "max|Im| " + ", ".join(f"m={m}: {v:.3f}" for m, v in worst.items())

    run_criterion("C7", 30.0, body)


def test_c8_pseudospectral_decay():
    def body():
        ms = np.array([5, 10, 20, 40])
        inside = np.array([smallest_singular_value(toeplitz_matrix(PROTO, m).matrix) for m in ms])
        outside = np.array(
            [smallest_singular_value(toeplitz_matrix(PROTO, m).matrix - 3 * np.eye(2 * m)) for m in ms]
        )
        slope = float(np.polyfit(ms, np.log(inside), 1)[0])
        ok = slope < -0.1 and bool(np.all(outside >= 0.1))
        return ok, f"ln sigma_min(0) slope {slope:.3f}, min sigma_min(3) {outside.min():.3f}"

    run_criterion("C8", 10.0, body)


def test_c9_symbolic_eigenvectors_and_decay():
    e = ellipse_geometry(PROTO)

    def body():
        rng = np.random.default_rng(SEED + 9)
        worst_res = 0.0
        drawn = 0
        while drawn < 50:
            alpha = rng.uniform(-np.pi, np.pi)
            beta = rng.uniform(0, e.delta / 2)
            lam = np.linalg.eigvals(evaluate(PROTO, np.exp(-1j * (alpha + 1j * beta))))[rng.integers(2)]
            if classify(PROTO, lam).tag is not SpectralTag.WINDING_INTERIOR:
                continue
            try:
                ev = symbolic_eigenvector(PROTO, lam, 40)
            except ConfluentModeError:
                continue
            worst_res = max(worst_res, ev.residual)
            drawn += 1
        decay_err = 0.0
        for beta in np.linspace(0, e.delta, 7):
            z = np.exp(-1j * (rng.uniform(-np.pi, np.pi) + 1j * beta))
            mode = quasiperiodic_extension(rng.normal(size=2) + 1j * rng.normal(size=2), z, 40)
            decay_err = max(decay_err, abs(decay_rate(mode.samples, 2).beta - beta))
        ratio = decay_table(PROTO, 20).column("beta_hat") / (e.delta / 2)
        frac = float(np.mean(np.abs(ratio - 1) <= 0.1))
        ok = worst_res < 1e-8 and decay_err < 1e-10 and frac >= 0.8
        return ok, (f"max residual {worst_res:.1e}, exact-mode decay err {decay_err:.1e}, "
                    f"{frac:.0%} of open modes within 10% of Delta/2")

    run_criterion("C9", 20.0, body)


def test_c10_hermitian_reduction():
    def body():
        e = ellipse_geometry(HERMITIAN)
        zone = GeneralisedBrillouinZone.from_symbol(HERMITIAN)
        n = 4001
        sets = {
            "obc": obc_limit_set(HERMITIAN, n),
            "pbc": pbc_limit_sample(HERMITIAN, n),
            "laurent": laurent_spectrum_sample(HERMITIAN, n),
        }
        bound = curve_sampling_bound(HERMITIAN, n, 0.0)
        pairs = [("obc", "pbc"), ("obc", "laurent"), ("pbc", "laurent")]
        dists = [hausdorff_distance(sets[a], sets[b]).distance for a, b in pairs]
        ok = abs(e.delta) <= 1e-12 and zone.is_classical and zone.beta_range == (0.0, 0.0) \
            and max(dists) <= bound
        return ok, (f"Delta={e.delta:.1e}, classical zone={zone.is_classical}, "
                    f"max pairwise Hausdorff {max(dists):.1e} (bound {bound:.1e})")

    run_criterion("C10", 5.0, body)


def test_c11_boundary_sensitivity():
    def body():
        h = hausdorff_distance(finite_obc_spectrum(PROTO, 10), pbc_spectrum(PROTO, 10)).distance
        return h > 0.5, f"Hausdorff(open, periodic) at m=10 = {h:.3f}"

    run_criterion("C11", 1.0, body)


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(summary_lines()))
