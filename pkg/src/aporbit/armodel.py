"""Exact decomposition of linear-recurrence orbits.

For z(t) = sum_l p_l z(t-l) the characteristic polynomial
mu^d - sum_l p_l mu^(d-l) factors over C; with roots mu_j of multiplicity
m_j the orbit has the closed form

    z(t) = sum_j a_j t^(k_j) mu_j^t        (k_j = 0..m_j-1 per root)

whose coefficients are fixed by the first d samples.  Bounded orbits have
every root either strictly inside the unit circle or simple on it, which
splits z into an almost periodic part (unit-circle terms, a finite sum of
complex exponentials with real frequencies) plus a decaying remainder.

Roots come from an Aberth-Ehrlich simultaneous iteration written here;
multiplicities are recovered by clustering and verified through the
derivative values at the polished representative.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    IllConditioned,
    OutOfRange,
    RefusedUnbounded,
    RootFindingFailed,
)

UNIT_CIRCLE_TOL = 1e-9
_RESIDUAL_TOL = 1e-12
_MAX_ITER = 500
_RESTARTS = 4
_MERGE_RADIUS = 5e-3   # widest separation a multiple root's copies can show
_FINAL_RADIUS = 1e-8   # reporting merge radius
_DERIV_TOL = 1e-6      # relative derivative size accepted as "vanishes"
_COND_LIMIT = 1e12


@dataclass(frozen=True)
class ARSpec:
    """Recurrence coefficients p_1..p_d and initial data.

    `initial` is ordered (z(0), z(-1), ..., z(-d+1)).  Initial data must
    lie in [-1,1]; later iterates may leave the box (this module's algebra
    does not need it, unlike the quantization pipeline).
    """

    p: tuple[float, ...]
    initial: tuple[float, ...]

    def __init__(self, p, initial):
        p = tuple(float(v) for v in p)
        initial = tuple(float(v) for v in initial)
        if not p:
            raise DimensionMismatch("need at least one coefficient")
        if len(initial) != len(p):
            raise DimensionMismatch(
                f"{len(initial)} initial values for order {len(p)}"
            )
        for v in initial:
            if abs(v) > 1.0 + 1e-12:
                raise OutOfRange(f"initial value {v!r} outside [-1,1]")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "initial", initial)

    @property
    def d(self) -> int:
        return len(self.p)

    def to_json(self):
        return {"p": list(self.p), "z0": list(self.initial)}


def recursion(spec: ARSpec, horizon: int) -> np.ndarray:
    """z(0)..z(horizon) by direct recursion from the initial data."""
    d = spec.d
    # history[i] = z(t - i) going into step t+1
    history = list(spec.initial)
    out = np.empty(horizon + 1)
    out[0] = spec.initial[0]
    for t in range(1, horizon + 1):
        z = 0.0
        for l in range(d):
            z += spec.p[l] * history[l]
        history = [z] + history[:-1]
        out[t] = z
    return out


def char_coefficients(spec: ARSpec) -> np.ndarray:
    """Monic characteristic coefficients [1, -p_1, ..., -p_d], highest first."""
    return np.concatenate([[1.0], -np.asarray(spec.p, dtype=float)])


def _polyval(coeffs: np.ndarray, z):
    out = np.zeros_like(np.asarray(z, dtype=complex))
    for c in coeffs:
        out = out * z + c
    return out


def _polyder(coeffs: np.ndarray) -> np.ndarray:
    n = len(coeffs) - 1
    return coeffs[:-1] * np.arange(n, 0, -1)


def _residual_scale(coeffs: np.ndarray, z: complex) -> float:
    """sum |c_i| max(1,|z|)^(deg-i): magnitude budget for |p(z)|."""
    az = max(1.0, abs(z))
    scale = 0.0
    for c in coeffs:
        scale = scale * az + abs(c)
    return max(scale, 1.0)


def _aberth(coeffs: np.ndarray, tol: float, rng) -> np.ndarray:
    """Simultaneous root iteration for a monic complex polynomial."""
    n = len(coeffs) - 1
    if n == 0:
        return np.array([], dtype=complex)
    if n == 1:
        return np.array([-coeffs[1] / coeffs[0]], dtype=complex)
    deriv = _polyder(coeffs)
    radius = 1.0 + max(abs(c) for c in coeffs[1:])
    for attempt in range(_RESTARTS):
        angles = 2.0 * np.pi * np.arange(n) / n + 0.4
        z = 0.7 * radius * np.exp(1j * angles)
        if attempt > 0:
            z = z * (1.0 + 0.2 * rng.random(n)) * np.exp(1j * rng.random(n))
        for _ in range(_MAX_ITER):
            p = _polyval(coeffs, z)
            scales = np.array([_residual_scale(coeffs, zi) for zi in z])
            if np.all(np.abs(p) <= tol * scales):
                return z
            pd = _polyval(deriv, z)
            pd = np.where(pd == 0, 1e-300, pd)
            w = p / pd
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            near = np.abs(diff) < 1e-14
            np.fill_diagonal(near, False)
            if near.any():
                z = z + 1e-10 * rng.standard_normal(n)
                continue
            s = (1.0 / diff).sum(axis=1) - 1.0  # subtract the diagonal 1/1
            denom = 1.0 - w * s
            denom = np.where(np.abs(denom) < 1e-300, 1.0, denom)
            step = w / denom
            z = z - step
            if np.max(np.abs(step)) < 1e-16 * (1.0 + np.max(np.abs(z))):
                break
        p = _polyval(coeffs, z)
        scales = np.array([_residual_scale(coeffs, zi) for zi in z])
        if np.all(np.abs(p) <= tol * scales):
            return z
    raise RootFindingFailed(
        f"residual tolerance {tol:g} unreachable within "
        f"{_RESTARTS} restarts of {_MAX_ITER} iterations"
    )


def _newton_polish(coeffs: np.ndarray, z: complex, steps: int = 50) -> complex:
    deriv = _polyder(coeffs)
    for _ in range(steps):
        pv = complex(_polyval(coeffs, z))
        dv = complex(_polyval(deriv, z))
        if dv == 0:
            break
        step = pv / dv
        z = z - step
        if abs(step) < 1e-17 * max(1.0, abs(z)):
            break
    return z


def _derivative_chain(coeffs: np.ndarray, count: int) -> list[np.ndarray]:
    """[p, p', p'', ...] up to `count` derivatives."""
    chain = [coeffs]
    for _ in range(count):
        chain.append(_polyder(chain[-1]))
    return chain


def _try_multiple_root(coeffs: np.ndarray, center: complex, m: int):
    """Polish a hypothesized m-fold root and verify the hypothesis.

    The (m-1)th derivative has a simple root at a true m-fold root, so
    Newton there reaches machine precision; all lower derivatives must
    then vanish to rounding.  Returns the polished root or None.
    """
    chain = _derivative_chain(coeffs, m - 1)
    rep = _newton_polish(chain[m - 1], center)
    ok = all(
        abs(complex(_polyval(chain[k], rep)))
        <= _DERIV_TOL * _residual_scale(chain[k], rep)
        for k in range(m)
    )
    return rep if ok else None


def _cluster_and_polish(coeffs: np.ndarray, raw: np.ndarray) -> list[tuple[complex, int]]:
    """Group raw iterates into verified (root, multiplicity) clusters.

    An m-fold root leaves the solver with m copies spread over a radius
    like (residual_tol)^(1/m), so no fixed radius separates true clusters
    from neighbors.  Instead, agglomerate: repeatedly take the closest
    pair of clusters within the merge radius and accept the merge only if
    the derivative test confirms a genuine multiple root; rejected pairs
    stay apart.  A final pass merges at the reporting radius.
    """
    entries: list[tuple[complex, int]] = [
        (_newton_polish(coeffs, z), 1) for z in raw
    ]
    rejected: set[tuple[int, int]] = set()
    ids = list(range(len(entries)))  # stable identity per cluster for memoing
    next_id = len(entries)
    while len(entries) > 1:
        best = None
        for i in range(len(entries)):
            for j in range(i + 1, len(entries)):
                if (ids[i], ids[j]) in rejected:
                    continue
                zi, zj = entries[i][0], entries[j][0]
                dist = abs(zi - zj)
                if dist <= _MERGE_RADIUS * max(1.0, abs(zi)):
                    if best is None or dist < best[0]:
                        best = (dist, i, j)
        if best is None:
            break
        _, i, j = best
        (zi, mi), (zj, mj) = entries[i], entries[j]
        center = (mi * zi + mj * zj) / (mi + mj)
        rep = _try_multiple_root(coeffs, center, mi + mj)
        if rep is None:
            rejected.add((ids[i], ids[j]))
            continue
        entries = [e for k, e in enumerate(entries) if k not in (i, j)]
        ids = [v for k, v in enumerate(ids) if k not in (i, j)]
        entries.append((rep, mi + mj))
        ids.append(next_id)
        next_id += 1

    # Reporting-radius merge: polished copies of one multiple root coincide.
    merged: list[tuple[complex, int]] = []
    for rep, m in sorted(entries, key=lambda rm: (rm[0].real, rm[0].imag)):
        for i, (other, mo) in enumerate(merged):
            if abs(rep - other) <= _FINAL_RADIUS * max(1.0, abs(other)):
                merged[i] = (other, mo + m)
                break
        else:
            merged.append((rep, m))
    return merged


def _symmetrize_conjugates(
    roots: list[tuple[complex, int]]
) -> list[tuple[complex, int]]:
    """Snap near-real roots to the axis and pair the rest bitwise."""
    real_roots = []
    upper = []
    lower = []
    for mu, m in roots:
        if abs(mu.imag) <= _FINAL_RADIUS * max(1.0, abs(mu)):
            real_roots.append((complex(mu.real, 0.0), m))
        elif mu.imag > 0:
            upper.append((mu, m))
        else:
            lower.append((mu, m))
    if len(upper) != len(lower):
        raise RootFindingFailed(
            "conjugate pairing failed: unbalanced complex roots for a real "
            "polynomial"
        )
    upper.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    lower.sort(key=lambda rm: (rm[0].real, -rm[0].imag))
    paired = []
    for (u, mu_m), (l, ml_m) in zip(upper, lower):
        if mu_m != ml_m or abs(u - l.conjugate()) > 1e-6 * max(1.0, abs(u)):
            raise RootFindingFailed("conjugate pairing failed: mismatched pair")
        mean = (u + l.conjugate()) / 2.0
        paired.append((mean, mu_m))
        paired.append((mean.conjugate(), mu_m))
    out = real_roots + paired
    out.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    return out


@dataclass(frozen=True)
class RootSet:
    """Characteristic roots with multiplicities; sum of multiplicities = d."""

    roots: tuple  # ((mu, multiplicity), ...)
    residual: float

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.roots)

    def to_json(self):
        # unit_gap = ||mu| - 1| lets borderline circle calls be audited
        return {
            "roots": [
                {
                    "re": mu.real,
                    "im": mu.imag,
                    "multiplicity": m,
                    "unit_gap": abs(abs(mu) - 1.0),
                }
                for mu, m in self.roots
            ],
            "residual": self.residual,
        }


def characteristic_roots(spec: ARSpec, tol: float = _RESIDUAL_TOL) -> RootSet:
    """All complex roots of the characteristic polynomial, with multiplicities.

    Trailing zero coefficients are factored out exactly as roots at zero;
    conjugate symmetry is enforced bitwise on the rest.
    """
    coeffs = char_coefficients(spec)
    zero_mult = 0
    while len(coeffs) > 1 and coeffs[-1] == 0.0:
        coeffs = coeffs[:-1]
        zero_mult += 1
    rng = np.random.default_rng(1234)
    raw = _aberth(coeffs.astype(complex), tol, rng)
    clustered = _cluster_and_polish(coeffs.astype(complex), raw)
    clustered = _symmetrize_conjugates(clustered)
    clustered = [(complex(mu), m) for mu, m in clustered]
    if zero_mult:
        clustered = [(0.0 + 0.0j, zero_mult)] + clustered
    full = char_coefficients(spec).astype(complex)
    residual = 0.0
    for mu, _ in clustered:
        residual = max(residual, abs(complex(_polyval(full, mu))))
    if residual > tol * max(_residual_scale(full, mu) for mu, _ in clustered):
        raise RootFindingFailed(f"worst residual {residual:g} above tolerance")
    return RootSet(roots=tuple(clustered), residual=residual)


def classify(roots: RootSet, circle_tol: float = UNIT_CIRCLE_TOL) -> str:
    """"bounded" iff every root is strictly inside the circle or simple on it."""
    for mu, m in roots.roots:
        r = abs(mu)
        if r < 1.0 - circle_tol:
            continue
        if abs(r - 1.0) <= circle_tol and m == 1:
            continue
        return "unbounded"
    return "bounded"


@dataclass(frozen=True)
class Term:
    """One closed-form basis term a * t^power * mu^t.

    kind "unit":      |mu| = 1 (almost periodic contribution)
    kind "decay":     0 < |mu| < 1
    kind "transient": mu = 0; the basis function is 1 at t = power, else 0
    """

    mu: complex
    power: int
    coeff: complex
    kind: str

    def basis_at(self, t: int) -> complex:
        if self.kind == "transient":
            return 1.0 + 0.0j if t == self.power else 0.0 + 0.0j
        return (t ** self.power) * self.mu ** t

    def to_json(self):
        return {
            "mu_re": self.mu.real,
            "mu_im": self.mu.imag,
            "power": self.power,
            "coeff_re": self.coeff.real,
            "coeff_im": self.coeff.imag,
            "kind": self.kind,
        }


@dataclass(frozen=True)
class ARDecomposition:
    terms: tuple[Term, ...]
    classification: str
    condition: float
    solve_residual: float

    @property
    def unit_terms(self) -> tuple[Term, ...]:
        return tuple(t for t in self.terms if t.kind == "unit")

    @property
    def decay_terms(self) -> tuple[Term, ...]:
        return tuple(t for t in self.terms if t.kind == "decay")

    @property
    def transient_terms(self) -> tuple[Term, ...]:
        return tuple(t for t in self.terms if t.kind == "transient")

    @property
    def decay_radius(self) -> float:
        """Largest modulus among decaying roots (0 if none)."""
        return max((abs(t.mu) for t in self.decay_terms), default=0.0)

    def evaluate(self, t: int) -> float:
        total = 0.0 + 0.0j
        for term in self.terms:
            total += term.coeff * term.basis_at(t)
        return float(total.real)

    def evaluate_complex(self, t: int) -> complex:
        return complex(sum(term.coeff * term.basis_at(t) for term in self.terms))

    def to_json(self):
        return {
            "terms": [t.to_json() for t in self.terms],
            "classification": self.classification,
            "condition": self.condition,
            "solve_residual": self.solve_residual,
            "decay_radius": self.decay_radius,
        }


def _solve_full_pivot(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dense complex solve by Gaussian elimination with full pivoting,
    followed by one step of iterative refinement."""
    n = A.shape[0]
    M = A.astype(complex).copy()
    rhs = b.astype(complex).copy()
    col_perm = list(range(n))
    for k in range(n):
        sub = np.abs(M[k:, k:])
        i_rel, j_rel = np.unravel_index(np.argmax(sub), sub.shape)
        i, j = k + i_rel, k + j_rel
        if M[i, j] == 0:
            raise IllConditioned("singular interpolation matrix", math.inf)
        M[[k, i], :] = M[[i, k], :]
        rhs[[k, i]] = rhs[[i, k]]
        M[:, [k, j]] = M[:, [j, k]]
        col_perm[k], col_perm[j] = col_perm[j], col_perm[k]
        factor = M[k + 1 :, k] / M[k, k]
        M[k + 1 :, k:] -= np.outer(factor, M[k, k:])
        rhs[k + 1 :] -= factor * rhs[k]
    y = np.zeros(n, dtype=complex)
    for k in range(n - 1, -1, -1):
        y[k] = (rhs[k] - M[k, k + 1 :] @ y[k + 1 :]) / M[k, k]
    x = np.zeros(n, dtype=complex)
    for k, col in enumerate(col_perm):
        x[col] = y[k]
    # One refinement step against the original system.
    r = b - A @ x
    if np.max(np.abs(r)) > 0:
        dx = np.linalg.solve(A, r)
        x = x + dx
    return x


def _build_terms(roots: RootSet, circle_tol: float) -> list[Term]:
    terms = []
    for mu, m in roots.roots:
        for k in range(m):
            if mu == 0:
                kind = "transient"
            elif abs(abs(mu) - 1.0) <= circle_tol:
                kind = "unit"
            else:
                kind = "decay"
            terms.append(Term(mu=mu, power=k, coeff=0.0 + 0.0j, kind=kind))
    return terms


def solve_coefficients(
    spec: ARSpec,
    roots: RootSet | None = None,
    circle_tol: float = UNIT_CIRCLE_TOL,
) -> ARDecomposition:
    """Fix the closed-form coefficients from the first d recurrence values.

    Builds the confluent interpolation system over the basis functions
    t^k mu^t (Kronecker deltas for zero roots) at t = 0..d-1 and solves it
    with full pivoting plus one refinement step.  Refuses unbounded specs
    and systems with condition estimate above 1e12.
    """
    if roots is None:
        roots = characteristic_roots(spec)
    if classify(roots, circle_tol) != "bounded":
        raise RefusedUnbounded(
            "decomposition refused: a root grows (|mu|>1, or repeated on "
            "the unit circle)"
        )
    d = spec.d
    terms = _build_terms(roots, circle_tol)
    z_head = recursion(spec, d - 1)
    A = np.zeros((d, len(terms)), dtype=complex)
    for t in range(d):
        for j, term in enumerate(terms):
            A[t, j] = term.basis_at(t)
    condition = float(np.linalg.cond(A))
    if condition > _COND_LIMIT:
        raise IllConditioned("confluent interpolation system", condition)
    coeffs = _solve_full_pivot(A, z_head.astype(complex))
    solve_residual = float(np.max(np.abs(A @ coeffs - z_head)))

    # Conjugate symmetry of the coefficients: a(mu_conj) = conj(a(mu)).
    by_key = {}
    for j, term in enumerate(terms):
        by_key[(term.mu, term.power)] = j
    fixed = coeffs.copy()
    for j, term in enumerate(terms):
        if term.mu.imag == 0:
            fixed[j] = complex(coeffs[j].real, 0.0)
        elif term.mu.imag > 0:
            partner = by_key.get((term.mu.conjugate(), term.power))
            if partner is not None:
                mean = (coeffs[j] + coeffs[partner].conjugate()) / 2.0
                fixed[j] = mean
                fixed[partner] = mean.conjugate()
    terms = [
        Term(mu=t.mu, power=t.power, coeff=complex(c), kind=t.kind)
        for t, c in zip(terms, fixed)
    ]
    return ARDecomposition(
        terms=tuple(terms),
        classification="bounded",
        condition=condition,
        solve_residual=solve_residual,
    )


class AlmostPeriodicSum:
    """Finite sum of complex exponentials sum_k c_k e^(i lambda_k t).

    Frequencies come in +/- pairs with conjugate coefficients, so the
    value is real at every integer t.
    """

    def __init__(self, frequencies, coefficients):
        self.frequencies = tuple(float(f) for f in frequencies)
        self.coefficients = tuple(complex(c) for c in coefficients)

    def __call__(self, t):
        total = 0.0 + 0.0j
        for lam, c in zip(self.frequencies, self.coefficients):
            total += c * cmath.exp(1j * lam * t)
        return total.real

    def to_json(self):
        return {
            "frequencies": list(self.frequencies),
            "coefficients": [[c.real, c.imag] for c in self.coefficients],
        }


class DecayingRemainder:
    """R(t): the decaying terms plus the finitely supported transients."""

    def __init__(self, terms):
        self.terms = tuple(terms)

    def __call__(self, t):
        total = 0.0 + 0.0j
        for term in self.terms:
            total += term.coeff * term.basis_at(t)
        return total.real


def split(dec: ARDecomposition) -> tuple[AlmostPeriodicSum, DecayingRemainder]:
    """Partition the closed form into (almost periodic part, remainder).

    The almost periodic part collects the unit-circle terms as a real
    trigonometric sum with frequencies arg(mu); the remainder collects
    everything that vanishes as t grows.
    """
    freqs = []
    coeffs = []
    for term in dec.unit_terms:
        freqs.append(cmath.phase(term.mu))
        coeffs.append(term.coeff)
    ap = AlmostPeriodicSum(freqs, coeffs)
    rest = DecayingRemainder(dec.decay_terms + dec.transient_terms)
    return ap, rest


@dataclass(frozen=True)
class DecompositionReport:
    closed_form_max_error: float
    decay_radius: float
    remainder_at_zero: float
    convergence_ok: bool
    horizon: int

    def to_json(self):
        return {
            "closed_form_max_error": self.closed_form_max_error,
            "decay_radius": self.decay_radius,
            "remainder_at_zero": self.remainder_at_zero,
            "convergence_ok": self.convergence_ok,
            "horizon": self.horizon,
        }


def verify_decomposition(
    spec: ARSpec, dec: ARDecomposition, horizon: int = 200
) -> DecompositionReport:
    """Compare the recursion with the closed form and with ap + remainder.

    Closed-form fidelity: max |z_rec(t) - z_closed(t)| for t <= horizon.
    Convergence fidelity: |z(t) - ap(t)| <= C rho^t for t >= d, with
    rho the largest decay modulus and C fitted at t = 0.
    """
    z = recursion(spec, horizon)
    closed = np.array([dec.evaluate(t) for t in range(horizon + 1)])
    closed_err = float(np.max(np.abs(z - closed)))
    ap, rest = split(dec)
    rho = dec.decay_radius
    C = abs(rest(0))
    ok = True
    for t in range(spec.d, horizon + 1):
        gap = abs(z[t] - ap(t))
        allowed = C * rho ** t + 1e-9
        if gap > allowed:
            ok = False
            break
    return DecompositionReport(
        closed_form_max_error=closed_err,
        decay_radius=rho,
        remainder_at_zero=C,
        convergence_ok=ok,
        horizon=horizon,
    )


def coefficients_from_roots(roots) -> tuple[float, ...]:
    """Expand prod (mu - mu_j) and return recurrence coefficients p_1..p_d.

    `roots` is a flat list of complex roots (repeat a root for
    multiplicity); conjugates must appear in pairs for a real recurrence.
    """
    poly = np.array([1.0 + 0.0j])
    for mu in roots:
        poly = np.convolve(poly, np.array([1.0, -complex(mu)]))
    worst_imag = float(np.max(np.abs(poly.imag)))
    if worst_imag > 1e-9 * max(1.0, float(np.max(np.abs(poly)))):
        raise ValueError("roots are not conjugate-symmetric; recurrence not real")
    return tuple(float(-c) for c in poly.real[1:])


def spec_from_roots(roots, coefficients, scale_to_box: bool = True) -> ARSpec:
    """Build an ARSpec realizing z(t) = sum a_j t^k mu_j^t exactly.

    `roots` pairs (mu, multiplicity); `coefficients` lists a_j in the same
    (root, power) order as the expansion.  Initial data is evaluated from
    the closed form at t = 0, -1, ..., -d+1 and, when requested, the
    coefficients are rescaled so the initial data fits in [-1,1].
    """
    flat = []
    for mu, m in roots:
        flat.extend([mu] * m)
    p = coefficients_from_roots(flat)
    d = len(p)
    basis = []
    for mu, m in roots:
        for k in range(m):
            basis.append((complex(mu), k))
    if len(coefficients) != len(basis):
        raise DimensionMismatch("one coefficient per (root, power) pair required")

    def closed(t):
        total = 0.0 + 0.0j
        for (mu, k), a in zip(basis, coefficients):
            if mu == 0:
                total += a * (1.0 if t == k else 0.0)
            else:
                total += a * (t ** k) * mu ** t
        return total.real

    init = [closed(-t) for t in range(d)]
    if scale_to_box:
        peak = max(abs(v) for v in init)
        if peak > 1.0:
            factor = 1.0 / (peak * (1.0 + 1e-9))
            coefficients = [a * factor for a in coefficients]
            init = [v * factor for v in init]
    return ARSpec(p=p, initial=init)
