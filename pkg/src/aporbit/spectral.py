"""Exact sinusoid representation of a certified periodic chain.

An eventually periodic sequence with period L is, on its periodic tail,
a finite sum of at most floor(L/2)+1 harmonics:

    y(t) = sum_{m=0}^{M} a_m sin(2 pi m t / L) + b_m cos(2 pi m t / L)

valid at every integer t >= T.  Coefficients come from the real discrete
Fourier analysis of one period, with the phase shift induced by the
pre-period T folded in so the formula holds in t itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BeforePhaseOrigin, NotPeriodic
from .orbit import ChainResult


@dataclass(frozen=True, eq=False)
class TrigForm:
    period: int       # L
    phase_origin: int  # T: the formula holds for t >= T
    harmonics: int    # M = floor(L/2)
    a: np.ndarray     # sine coefficients, shape (M+1, d)
    b: np.ndarray     # cosine coefficients, shape (M+1, d)

    @property
    def d(self) -> int:
        return self.a.shape[1]

    def to_json(self):
        return {
            "L": self.period,
            "T": self.phase_origin,
            "M": self.harmonics,
            "a": self.a.tolist(),
            "b": self.b.tolist(),
        }


def _reduced_angles(m: int, ts, L: int) -> np.ndarray:
    # Angles 2 pi m t / L with the integer product reduced mod L first,
    # so precision does not degrade for large t.
    ts = np.asarray(ts, dtype=np.int64)
    return 2.0 * np.pi * ((m * ts) % L) / L


def fit_trig_samples(values: np.ndarray, pre_period: int, period: int) -> TrigForm:
    """Fit one period of samples values[u] = y(T+u), u = 0..L-1.

    Direct O(L^2) Fourier summation; the phase shift by T is folded into
    the coefficients exactly (integer modular reduction of m*T).
    """
    values = np.asarray(values, dtype=float)
    L = period
    T = pre_period
    if values.ndim != 2 or values.shape[0] != L:
        raise ValueError(f"need samples of shape (L, d), got {values.shape}")
    d = values.shape[1]
    M = L // 2
    a = np.zeros((M + 1, d))
    b = np.zeros((M + 1, d))
    us = np.arange(L, dtype=np.int64)
    for m in range(M + 1):
        ang = _reduced_angles(m, us, L)
        if m == 0:
            alpha_c = values.mean(axis=0)
            alpha_s = np.zeros(d)
        elif 2 * m == L:
            alpha_c = (np.cos(ang) @ values) / L  # cos(pi*u) = +/-1 exactly
            alpha_s = np.zeros(d)
        else:
            alpha_c = (np.cos(ang) @ values) * (2.0 / L)
            alpha_s = (np.sin(ang) @ values) * (2.0 / L)
        # Fold the shift by T:  cos(th(t-T)) and sin(th(t-T)) expand into
        # cos(th t), sin(th t) with a rotation by phi = 2 pi m T / L.
        shift = (m * T) % L
        if m == 0:
            b[m] = alpha_c
        elif 2 * m == L:
            # For integer T the sine part vanishes; shift is 0 or L/2.
            b[m] = alpha_c if shift == 0 else -alpha_c
        else:
            phi = 2.0 * np.pi * shift / L
            c, s = np.cos(phi), np.sin(phi)
            b[m] = alpha_c * c - alpha_s * s
            a[m] = alpha_c * s + alpha_s * c
    return TrigForm(period=L, phase_origin=T, harmonics=M, a=a, b=b)


def fit_trig(chain: ChainResult) -> TrigForm:
    """Fit the periodic tail of a chain; requires its (T, L) certificate."""
    if not isinstance(chain, ChainResult) or chain.period < 1:
        raise NotPeriodic("chain carries no periodicity certificate")
    T, L = chain.pre_period, chain.period
    if chain.state_at(T) != chain.state_at(T + L):
        raise NotPeriodic("chain states contradict the (T, L) certificate")
    values = chain.values(T, T + L - 1)
    return fit_trig_samples(values, T, L)


def eval_trig(form: TrigForm, t: int) -> np.ndarray:
    """Evaluate the finite sum at integer t >= T; returns a length-d vector."""
    if t < form.phase_origin:
        raise BeforePhaseOrigin(
            f"t={t} is before the phase origin T={form.phase_origin}"
        )
    L = form.period
    ms = np.arange(form.harmonics + 1, dtype=np.int64)
    ang = 2.0 * np.pi * ((ms * int(t)) % L) / L
    return np.sin(ang) @ form.a + np.cos(ang) @ form.b


def eval_trig_range(form: TrigForm, t_start: int, t_end: int) -> np.ndarray:
    """eval_trig over t_start..t_end inclusive, shape (n, d)."""
    return np.array([eval_trig(form, t) for t in range(t_start, t_end + 1)])


def parseval_gap(form: TrigForm, values: np.ndarray) -> float:
    """Worst per-coordinate gap between mean squared samples and the
    coefficient energy b_0^2 + sum (a_m^2+b_m^2)/2 (Nyquist term weight 1)."""
    values = np.asarray(values, dtype=float)
    L = form.period
    mean_sq = (values ** 2).mean(axis=0)
    energy = form.b[0] ** 2
    for m in range(1, form.harmonics + 1):
        weight = 1.0 if 2 * m == L else 0.5
        energy = energy + weight * (form.a[m] ** 2 + form.b[m] ** 2)
    return float(np.max(np.abs(mean_sq - energy)))
