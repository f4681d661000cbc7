"""State-vector simulation of the coined walk on the integer line.

The walker carries a two-level coin.  One step applies the SO(2) coin
rotation to the coin register, then shifts coin-0 amplitude one site right
and coin-1 amplitude one site left.  ``evolve``/``position_pmf`` are the
ground-truth oracle the closed forms in ``pmf`` are tested against.

The module also carries the phase-space picture of the same dynamics: the
one-step kernel at momentum phi, its k-th power in closed form, and the
position-diagonal Kraus pair obtained by tracing out the coin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chebyshev import chebyshev_u
from .pmf import Pmf

__all__ = [
    "CoinParameter",
    "WalkState",
    "coin_matrix",
    "step",
    "evolve",
    "position_pmf",
    "kernel_matrix",
    "kernel_power",
    "kraus_kernels",
    "return_probability_kraus",
    "channel_position_pmf",
]


@dataclass(frozen=True)
class CoinParameter:
    """Coin angle theta, normalized to [-pi, pi), with lam = cos(theta) cached."""

    theta: float

    def __post_init__(self):
        t = math.remainder(self.theta, math.tau)
        if t == math.pi:
            t = -math.pi
        object.__setattr__(self, "theta", t)

    @classmethod
    def from_lambda(cls, lam: float) -> "CoinParameter":
        """Coin with the given lam = cos(theta), taking theta = acos(lam) in [0, pi]."""
        if abs(lam) > 1:
            raise ValueError(f"|lam| must be <= 1, got {lam}")
        return cls(math.acos(lam))

    @property
    def lam(self) -> float:
        return math.cos(self.theta)

    @property
    def sin_theta(self) -> float:
        return math.sin(self.theta)


def coin_matrix(p: CoinParameter) -> np.ndarray:
    """The SO(2) coin rotation [[cos, sin], [-sin, cos]]."""
    c, s = p.lam, p.sin_theta
    return np.array([[c, s], [-s, c]])


@dataclass(frozen=True, eq=False)
class WalkState:
    """Amplitudes over a contiguous position window.

    ``amps`` has shape (2, width): row 0 holds the coin-0 amplitude at
    positions lo, lo+1, ..., row 1 the coin-1 amplitude.  ``k`` counts the
    steps applied so far.  Instances are immutable; ``step`` returns a new
    state one site wider on each side.
    """

    k: int
    lo: int
    amps: np.ndarray

    def __post_init__(self):
        a = np.array(self.amps, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != 2 or a.shape[1] < 1:
            raise ValueError(f"amps must have shape (2, width>=1), got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @classmethod
    def origin(cls) -> "WalkState":
        """Walker at the origin with coin state |0>."""
        return cls(0, 0, np.array([[1.0], [0.0]]))

    @classmethod
    def localized(cls, position: int, coin=(1.0, 0.0)) -> "WalkState":
        """Walker at one site with the given (normalized) coin amplitudes."""
        c0, c1 = complex(coin[0]), complex(coin[1])
        if abs(abs(c0) ** 2 + abs(c1) ** 2 - 1.0) > 1e-9:
            raise ValueError("coin amplitudes must be normalized")
        return cls(0, int(position), np.array([[c0], [c1]]))

    @classmethod
    def from_amplitudes(cls, mapping: dict, k: int = 0) -> "WalkState":
        """State from a {(coin, position): amplitude} mapping, norm-checked."""
        if not mapping:
            raise ValueError("empty amplitude mapping")
        positions = [pos for _, pos in mapping]
        lo, hi = min(positions), max(positions)
        a = np.zeros((2, hi - lo + 1), dtype=np.complex128)
        for (coin, pos), amp in mapping.items():
            if coin not in (0, 1):
                raise ValueError(f"coin index must be 0 or 1, got {coin}")
            a[coin, pos - lo] += amp
        if abs(np.sum(np.abs(a) ** 2) - 1.0) > 1e-9:
            raise ValueError("amplitudes must be normalized")
        return cls(k, lo, a)

    @property
    def width(self) -> int:
        return self.amps.shape[1]

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.lo, self.lo + self.width)

    def amplitude(self, coin: int, position: int) -> complex:
        if coin not in (0, 1):
            raise ValueError(f"coin index must be 0 or 1, got {coin}")
        i = position - self.lo
        if i < 0 or i >= self.width:
            return 0j
        return complex(self.amps[coin, i])

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))


def step(state: WalkState, p: CoinParameter) -> WalkState:
    """One walk step: coin rotation, then coin-conditioned shift."""
    c, s = p.lam, p.sin_theta
    a0, a1 = state.amps
    new = np.zeros((2, state.width + 2), dtype=np.complex128)
    new[0, 2:] = c * a0 + s * a1        # coin 0 moves right
    new[1, : state.width] = -s * a0 + c * a1  # coin 1 moves left
    return WalkState(state.k + 1, state.lo - 1, new)


def evolve(state: WalkState, p: CoinParameter, steps: int) -> WalkState:
    """Apply ``steps`` walk steps (steps >= 0)."""
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    for _ in range(steps):
        state = step(state, p)
    return state


def position_pmf(state: WalkState) -> Pmf:
    """Distribution over every position in the state's window.

    Off-parity positions carry exactly zero probability for walks started
    from a single site; they are kept in the table so the zeros are
    visible in serialized output.
    """
    probs = np.sum(np.abs(state.amps) ** 2, axis=0)
    table = {int(pos): float(pr) for pos, pr in zip(state.positions, probs)}
    return Pmf(state.k, table, lam=None)


def kernel_matrix(phi: float, p: CoinParameter) -> np.ndarray:
    """One-step kernel at momentum phi.

    In the phase basis the shift is diagonal, so one step is the 2x2
    matrix [[e^{i phi} c, e^{-i phi} s], [-e^{i phi} s, e^{-i phi} c]]
    acting on the coin alone.
    """
    c, s = p.lam, p.sin_theta
    ep, em = np.exp(1j * phi), np.exp(-1j * phi)
    return np.array([[ep * c, em * s], [-ep * s, em * c]])


def kernel_power(phi: float, p: CoinParameter, k: int) -> np.ndarray:
    """k-th power of the kernel via its characteristic polynomial.

    M^k = M * U_{k-1}(xi) - I * U_{k-2}(xi) with xi = cos(theta) cos(phi),
    U_n the Chebyshev polynomials of the second kind.  No matrix powers
    are taken; this is the closed form the Kraus pair is built from.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if k == 0:
        return np.eye(2, dtype=np.complex128)
    xi = p.lam * math.cos(phi)
    u1 = chebyshev_u(k - 1, xi)
    u2 = chebyshev_u(k - 2, xi) if k >= 2 else 0.0
    return kernel_matrix(phi, p) * u1 - np.eye(2) * u2


def kraus_kernels(phi, p: CoinParameter, k: int):
    """Position-diagonal Kraus pair (A_k, B_k) at momentum phi.

    A_k = cos(theta) e^{i phi} U_{k-1}(xi) - U_{k-2}(xi)
    B_k = sin(theta) e^{-i phi} U_{k-1}(xi)

    with xi = cos(theta) cos(phi).  These are the two coin-trace branches
    of M^k for a coin-0 input; |A_k|^2 + |B_k|^2 = 1 pointwise.  ``phi``
    may be a scalar or an array.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    phi = np.asarray(phi, dtype=float)
    xi = p.lam * np.cos(phi)
    u1 = chebyshev_u(k - 1, xi)
    u2 = chebyshev_u(k - 2, xi) if k >= 2 else np.zeros_like(xi)
    a = p.lam * np.exp(1j * phi) * u1 - u2
    b = p.sin_theta * np.exp(-1j * phi) * u1
    return a, b


def return_probability_kraus(p: CoinParameter, k: int, resolution: int | None = None) -> float:
    """Probability of finding the walker back at its start site after k steps.

    Integrates the Kraus pair over momentum with the periodic trapezoid
    rule; the integrands are trigonometric polynomials of degree <= k+1,
    so the default node count 16*(k+4) is exact to rounding.
    """
    if resolution is None:
        resolution = 16 * (k + 4)
    phi = 2.0 * math.pi * np.arange(resolution) / resolution
    a, b = kraus_kernels(phi, p, k)
    a0 = np.mean(a)
    b0 = np.mean(b)
    return float(abs(a0) ** 2 + abs(b0) ** 2)


def channel_position_pmf(
    initial: WalkState, p: CoinParameter, steps: int, resolution: int | None = None
) -> Pmf:
    """Position distribution after k steps, computed through the Kraus pair.

    Transforms the initial coin-0 wavefunction to the phase basis, applies
    (A_k, -B_k), and transforms back.  Requires the initial coin register
    in state |0> (the pair is the coin-0 column of the k-step kernel).
    Agrees with ``position_pmf(evolve(...))`` on the same position axis;
    only the analytic forms in ``pmf`` are axis-reflected.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if np.max(np.abs(initial.amps[1])) > 1e-12:
        raise ValueError("channel form requires the coin register in state |0>")
    lo_out = initial.lo - steps
    hi_out = initial.lo + initial.width - 1 + steps
    if resolution is None:
        resolution = 16 * (steps + max(abs(lo_out), abs(hi_out)) + 4)
    phi = 2.0 * math.pi * np.arange(resolution) / resolution
    psi_hat = initial.amps[0] @ np.exp(1j * np.outer(initial.positions, phi))
    a_k, b_k = kraus_kernels(phi, p, steps)
    branch0 = a_k * psi_hat
    branch1 = -b_k * psi_hat
    out_positions = np.arange(lo_out, hi_out + 1)
    back = np.exp(-1j * np.outer(out_positions, phi))
    psi0 = back @ branch0 / resolution
    psi1 = back @ branch1 / resolution
    probs = np.abs(psi0) ** 2 + np.abs(psi1) ** 2
    table = {int(m): float(pr) for m, pr in zip(out_positions, probs)}
    return Pmf(initial.k + steps, table, lam=p.lam)
