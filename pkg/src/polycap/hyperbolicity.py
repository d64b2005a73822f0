"""Real-rootedness and half-plane diagnostics through restricted univariate
slices.

For a homogeneous polynomial p and a direction d with p(d) > 0, the slice
t -> p(x - t d) is a degree-n univariate polynomial. Stability of p along d
means every such slice has only real roots; that property, together with
positivity on the open right half-plane, is what the capacity machinery is
calibrated against. These diagnostics recover the restricted roots by
Chebyshev interpolation, validate the window through the root-product
identity prod(roots) = p(x)/p(d), and sample the half-plane condition
directly.

Numerical honesty about repeated roots: an m-fold real root computed through
a degree-n fit splits into a cluster with imaginary parts of order
(backward error)^(1/m), which can dwarf any fixed tolerance. The classifier
therefore compares each complex pair against the backward-error bound for a
repeated real root at the same location, so perfect powers (uniform product
matrices, equality families) classify as real while genuinely complex pairs
(macroscopic imaginary parts) still fail.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .errors import InputError, NotHyperbolicError
from .polynomials import EvaluationOracle

_VALIDATE_POINTS = (0.5, 1.0, 2.0, 3.0)
_FIT_NOISE = 1e-14  # relative backward error budget for the Chebyshev fit
_CLUSTER_SAFETY = 10.0
_TINY = 1e-300


@dataclass
class RootProfile:
    direction: tuple
    point: tuple
    roots: tuple
    max_imag: float
    all_real: bool
    residual: float

    def to_dict(self) -> dict:
        return {
            "direction": [float(v) for v in self.direction],
            "point": [float(v) for v in self.point],
            "roots": [[float(r.real), float(r.imag)] for r in self.roots],
            "max_imag": self.max_imag,
            "all_real": self.all_real,
            "residual": self.residual,
        }


class _SliceFit(NamedTuple):
    roots: tuple
    residual: float
    lead_abs: float  # |leading monomial coefficient| of the slice in t
    vmax: float      # max |slice value| over the fitted window


def _slice_values(poly, point, direction, ts):
    pt = np.array(point, dtype=float)
    d = np.array(direction, dtype=float)
    out = []
    for t in ts:
        out.append(complex(poly.evaluate(tuple(pt - t * d))).real)
    return np.array(out)


def _fit_once(poly, point, direction, M, n):
    """Interpolate the slice on [-M, M] and extract companion-matrix roots."""
    u_nodes = cheb.chebpts2(n + 1)
    vals = _slice_values(poly, point, direction, M * u_nodes)
    coeffs = cheb.chebfit(u_nodes, vals, n)
    vmax = float(np.abs(vals).max())
    # T_n has leading monomial coefficient 2^(n-1); convert to t = M u units.
    lead_u = float(coeffs[-1]) * (2.0 ** (n - 1) if n >= 1 else 1.0)
    lead_abs = abs(lead_u) / (M ** n if n >= 1 else 1.0)
    if abs(coeffs[-1]) <= 1e-13 * max(1.0, float(np.abs(coeffs).max())):
        return None, lead_abs, vmax
    roots = tuple(complex(r) * M for r in cheb.chebroots(coeffs))
    return roots, lead_abs, vmax


def _slice_fit(poly, point, direction) -> _SliceFit:
    n = poly.degree
    p_dir = complex(poly.evaluate(tuple(direction))).real
    p_point = complex(poly.evaluate(tuple(point))).real
    expected = p_point / p_dir  # prod(roots): both leading sign flips cancel

    x_norm = max((abs(v) for v in point), default=0.0)
    d_norm = max(max(abs(v) for v in direction), _TINY)
    M = 8.0 * (1.0 + x_norm / d_norm)

    best = None
    rescaled = False
    for _ in range(5):
        roots, lead_abs, vmax = _fit_once(poly, point, direction, M, n)
        if roots is None:
            M *= 4.0
            continue
        if not rescaled:
            # Second pass on a window matched to the actual root magnitudes:
            # conditioning of clustered roots degrades with oversized windows.
            rescaled = True
            r_max = max((abs(r) for r in roots), default=0.0)
            M_opt = min(max(4.0 * r_max, 1e-2), M)
            if M_opt < 0.5 * M:
                M = M_opt
                roots, lead_abs, vmax = _fit_once(poly, point, direction, M, n)
                if roots is None:
                    M *= 4.0
                    continue
        prod = complex(np.prod(roots)) if roots else complex(1.0)
        # Noise floor: prod(roots) = +-q(0)/lead, and q(0) carries absolute
        # interpolation noise ~ eps * vmax, so differences below
        # vmax/lead-scaled noise are not evidence of a bad window.
        atol = 1e-9 * vmax / max(lead_abs, _TINY)
        denom = max(abs(expected), abs(prod), atol, 1e-12)
        residual = abs(prod - expected) / denom
        fit = _SliceFit(roots, float(residual), lead_abs, vmax)
        if best is None or residual < best.residual:
            best = fit
        if residual <= 1e-6:
            return fit
        M *= 4.0
    if best is None:
        raise InputError(
            "slice interpolation degenerated: leading coefficient vanished "
            "at every window (is the polynomial of full degree along this "
            "direction?)")
    return best


def _repeated_root_tolerance(roots, j, lead_abs, vmax):
    """Backward-error radius for treating roots[j]'s cluster as one repeated
    real root: perturbing the slice by eps*vmax moves an m-fold root at t0
    with cofactor g by about (eps*vmax / |lead*g(t0)|)^(1/m)."""
    r = roots[j]
    b = abs(r.imag)
    center = complex(r.real, 0.0)
    radius = 4.0 * b
    cluster = [i for i, s in enumerate(roots) if abs(s - center) <= radius]
    m = max(len(cluster), 1)
    cofactor = 1.0
    for i, s in enumerate(roots):
        if i not in cluster:
            cofactor *= max(abs(center - s), _TINY)
    eta = (_FIT_NOISE * vmax / max(lead_abs * cofactor, _TINY)) ** (1.0 / m)
    return _CLUSTER_SAFETY * eta


def _classify_real(fit: _SliceFit, base_tol: float):
    """(all_real, max_imag): a complex pair counts as numerically real when
    its imaginary part is under base_tol*scale or within the repeated-real-
    root backward-error bound at its location."""
    roots = fit.roots
    if not roots:
        return True, 0.0
    scale = max(1.0, max(abs(r) for r in roots))
    max_imag = max(abs(r.imag) for r in roots)
    all_real = True
    for j, r in enumerate(roots):
        b = abs(r.imag)
        if b <= base_tol * scale:
            continue
        if b <= _repeated_root_tolerance(roots, j, fit.lead_abs, fit.vmax):
            continue
        all_real = False
        break
    return all_real, float(max_imag)


def _check_slice_inputs(poly, point, direction):
    point = tuple(float(v) for v in point)
    direction = tuple(float(v) for v in direction)
    if len(point) != poly.n_vars or len(direction) != poly.n_vars:
        raise InputError("point and direction must have length n_vars")
    p_dir = complex(poly.evaluate(direction)).real
    if not p_dir > 0:
        raise InputError(
            f"p(direction) = {p_dir}; root extraction needs a positive value")
    return point, direction


def restricted_roots(poly: EvaluationOracle, point, direction):
    """Roots (in t) of the univariate slice t -> p(point - t * direction).

    Requires p(direction) > 0 so the slice has full degree n. Returns
    (roots, residual): roots is a tuple of complex numbers (length = degree,
    with multiplicity), residual is the relative defect of the root-product
    identity prod(roots) = p(point)/p(direction) used to validate the
    interpolation window.
    """
    point, direction = _check_slice_inputs(poly, point, direction)
    fit = _slice_fit(poly, point, direction)
    return fit.roots, fit.residual


def root_profile(poly: EvaluationOracle, point, direction,
                 real_tol: float = 1e-6) -> RootProfile:
    """Restricted roots plus a real/complex classification for one slice."""
    point, direction = _check_slice_inputs(poly, point, direction)
    fit = _slice_fit(poly, point, direction)
    all_real, max_imag = _classify_real(fit, real_tol)
    return RootProfile(
        direction=direction,
        point=point,
        roots=fit.roots,
        max_imag=max_imag,
        all_real=all_real,
        residual=fit.residual,
    )


def real_rootedness_check(poly: EvaluationOracle, direction=None,
                          trials: int = 50, seed: int = 0,
                          real_tol: float = 1e-6):
    """Sample random slice points and test that every restricted polynomial
    is real-rooted along `direction` (default: the all-ones direction).

    Returns (ok, worst_profile): ok is True iff all trials were real-rooted;
    worst_profile is the failing slice with the largest imaginary part, or,
    if none failed, the slice with the largest imaginary part overall.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    n = poly.n_vars
    if direction is None:
        direction = tuple([1.0] * n)
    worst = None
    ok = True
    children = np.random.SeedSequence(seed).spawn(trials)
    for ss in children:
        rng = np.random.default_rng(ss)
        x = rng.standard_normal(n)
        profile = root_profile(poly, tuple(x), direction, real_tol=real_tol)
        if not profile.all_real:
            ok = False
        if (worst is None
                or (not profile.all_real and worst.all_real)
                or (profile.all_real == worst.all_real
                    and profile.max_imag > worst.max_imag)):
            worst = profile
    return ok, worst


def half_plane_sample_check(poly: EvaluationOracle, samples: int = 500,
                            seed: int = 0, margin_tol: float = 1e-9):
    """Sample z with Re(z) > 0 and test |p(z)| >= p(Re(z)) and |p(z)| > 0.

    Both hold for every polynomial with nonnegative coefficients that is
    nonvanishing on the open right half-plane; a negative worst margin or a
    zero witness refutes that property. Returns (ok, stats) with stats
    carrying samples, worst_margin, and the witness point if any failed.
    """
    if samples < 1:
        raise InputError("samples must be >= 1")
    n = poly.n_vars
    rng = np.random.default_rng(seed)
    worst_margin = np.inf
    witness = None
    ok = True
    for _ in range(samples):
        x = np.exp(rng.standard_normal(n))
        y = x * rng.standard_normal(n)
        z = x + 1j * y
        val = abs(complex(poly.evaluate(tuple(z))))
        base = float(complex(poly.evaluate(tuple(x))).real)
        margin = val / base - 1.0 if base > 0 else -1.0
        failed = val == 0.0 or margin < -margin_tol
        if margin < worst_margin:
            worst_margin = margin
            if failed:
                witness = [[float(a), float(b)] for a, b in zip(x, y)]
        if failed:
            ok = False
    stats = {
        "samples": samples,
        "worst_margin": float(worst_margin),
        "witness": witness,
    }
    return ok, stats


def factorization_check(poly: EvaluationOracle, z, y, real_tol: float = 1e-6):
    """Split p along a nonnegative direction pair: with d = z + y strictly
    positive, the slice R(t) = p(t z + y) of a stable p factors as
    prod_i (a_i t + b_i) with a_i, b_i >= 0.

    Computes lambda_i from the roots of s -> p(z - s d), which satisfy
    R(t) = p(d) * prod(lambda_i t + 1 - lambda_i); raises NotHyperbolicError
    when a root is materially complex or falls outside [0, 1]. Returns
    (a, b) sorted by descending a_i.
    """
    n = poly.degree
    z = tuple(float(v) for v in z)
    y = tuple(float(v) for v in y)
    if len(z) != poly.n_vars or len(y) != poly.n_vars:
        raise InputError("z and y must have length n_vars")
    if any(v < 0 for v in z) or any(v < 0 for v in y):
        raise InputError("z and y must be entrywise nonnegative")
    d = tuple(zi + yi for zi, yi in zip(z, y))
    if any(v <= 0 for v in d):
        raise InputError("z + y must be entrywise positive")

    p_d = float(complex(poly.evaluate(d)).real)
    if not p_d > 0:
        raise InputError(f"p(z + y) = {p_d}; expected a positive value")

    _, _ = _check_slice_inputs(poly, z, d)
    fit = _slice_fit(poly, z, d)
    scale = max(1.0, max((abs(r) for r in fit.roots), default=0.0))
    lam = []
    for j, r in enumerate(fit.roots):
        b = abs(r.imag)
        if (b > real_tol * scale
                and b > _repeated_root_tolerance(fit.roots, j, fit.lead_abs,
                                                 fit.vmax)):
            raise NotHyperbolicError(
                f"slice along z + y has a complex root {r}; the polynomial "
                "is not stable in this pencil", roots=fit.roots)
        v = r.real
        if v < -1e-7 * scale or v > 1.0 + 1e-7 * scale:
            raise NotHyperbolicError(
                f"slice root {v} falls outside [0, 1]; no nonnegative "
                "linear-factor split exists", roots=fit.roots)
        lam.append(min(max(v, 0.0), 1.0))
    lam.sort(reverse=True)

    s = p_d ** (1.0 / n)
    a = tuple(s * v for v in lam)
    b = tuple(s * (1.0 - v) for v in lam)

    # Confirm R(t) = p(t z + y) matches prod(a_i t + b_i) on a few points.
    for t in _VALIDATE_POINTS:
        lhs = float(complex(poly.evaluate(tuple(t * zi + yi
                                                for zi, yi in zip(z, y)))).real)
        rhs = 1.0
        for ai, bi in zip(a, b):
            rhs *= ai * t + bi
        denom = max(abs(lhs), abs(rhs), 1e-12)
        if abs(lhs - rhs) / denom > 1e-5:
            raise NotHyperbolicError(
                f"split failed validation at t = {t}: slice {lhs} vs "
                f"factored {rhs} (root residual {fit.residual:.3g})",
                roots=fit.roots)
    return a, b


def _zero_cluster_tolerance(roots, j, lead_abs, vmax):
    """Backward-error radius for treating roots[j]'s cluster as a repeated
    root at exactly zero (same analysis as _repeated_root_tolerance with the
    cluster centered at the origin)."""
    radius = 4.0 * abs(roots[j])
    cluster = [i for i, s in enumerate(roots) if abs(s) <= radius]
    m = max(len(cluster), 1)
    cofactor = 1.0
    for i, s in enumerate(roots):
        if i not in cluster:
            cofactor *= max(abs(s), _TINY)
    eta = (_FIT_NOISE * vmax / max(lead_abs * cofactor, _TINY)) ** (1.0 / m)
    return _CLUSTER_SAFETY * eta


def rank_via_roots(poly: EvaluationOracle, i: int, zero_tol: float = 1e-7,
                   warn_tol: float = 1e-9) -> int:
    """Count the nonzero roots of t -> p(e_i - t * ones): for stable p this
    equals the effective rank of variable i.

    A root counts as zero when its magnitude is below zero_tol relative to
    the root scale, or when its whole cluster sits within the backward-error
    radius of a repeated root at the origin (a double zero root, for
    instance, is recovered with magnitude ~ sqrt(fit noise), well above any
    fixed tolerance). Borderline roots (between warn_tol and zero_tol
    relative to the root scale) trigger a RuntimeWarning since the count may
    be off by one.
    """
    n = poly.n_vars
    if not 0 <= i < n:
        raise InputError(f"variable index {i} out of range for {n} variables")
    point = tuple(1.0 if j == i else 0.0 for j in range(n))
    direction = tuple([1.0] * n)
    point, direction = _check_slice_inputs(poly, point, direction)
    fit = _slice_fit(poly, point, direction)
    roots = fit.roots
    scale = max(1.0, max((abs(r) for r in roots), default=0.0))
    count = 0
    for j, r in enumerate(roots):
        mag = abs(r)
        if warn_tol * scale <= mag <= zero_tol * scale:
            warnings.warn(
                f"root of magnitude {mag:.3g} is borderline between zero and "
                f"nonzero at scale {scale:.3g}; rank count may be unstable",
                RuntimeWarning, stacklevel=2)
        if mag <= zero_tol * scale:
            continue
        if mag <= _zero_cluster_tolerance(roots, j, fit.lead_abs, fit.vmax):
            continue
        count += 1
    return count
