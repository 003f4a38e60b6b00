"""Brute-force qubit oracles and a seeded round simulator.

The oracles search the primal problems directly and share no code with
the closed forms in :mod:`udrand.analytic`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .quantum import BlochQubit, Decomposition, Povm, born

BORN_FLOOR = 1e-12


# ---------------------------------------------------------------- UD oracle


def _lmin2(a, b, c):
    # smallest eigenvalue of [[a, b], [b, c]]
    return 0.5 * (a + c) - np.sqrt(0.25 * (a - c) ** 2 + b * b)


def ud_oracle_qubit(b: BlochQubit, resolution: float = 1e-3, refine_tol: float = 1e-8) -> float:
    """Maximise ``p1 + p2`` subject to ``rho - diag(p1, p2) >= 0`` by search.

    A grid of step ``resolution`` over the box ``0 <= p_j <= rho_jj`` picks
    the best feasible point.  The objective along the feasible boundary is
    concave in ``p1`` but flat near its peak, so the grid optimum can sit far
    from the best ``p1``.  A golden-section search over the whole feasible
    range of ``p1``, with the largest feasible ``p2`` found by bisection,
    refines it to ``refine_tol``.
    """
    a, c, off = 0.5 * (1 + b.m), 0.5 * (1 - b.m), 0.5 * b.p
    g1 = np.append(np.arange(0.0, a, resolution), a)
    g2 = np.append(np.arange(0.0, c, resolution), c)
    P1, P2 = np.meshgrid(g1, g2, indexing="ij")
    feas = _lmin2(a - P1, off, c - P2) >= 0
    total = np.where(feas, P1 + P2, -np.inf)
    k = np.unravel_index(np.argmax(total), total.shape)
    best = float(total[k])

    def p2_max(p1):
        if _lmin2(a - p1, off, c) < 0:
            return -np.inf
        lo, hi = 0.0, c
        if _lmin2(a - p1, off, c - hi) >= 0:
            return hi
        while hi - lo > 1e-13:
            mid = 0.5 * (lo + hi)
            if _lmin2(a - p1, off, c - mid) >= 0:
                lo = mid
            else:
                hi = mid
        return lo

    def f(p1):
        return p1 + p2_max(p1)

    lo, hi = 0.0, a
    invphi = (np.sqrt(5) - 1) / 2
    x1, x2 = hi - invphi * (hi - lo), lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > refine_tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
    return max(best, f1, f2, f(lo), f(hi))


# ---------------------------------------------------------------- FRIO oracle


def _frio_objective(params: np.ndarray, r: np.ndarray, Q: float) -> np.ndarray:
    """Guessing probability for (radius, angle, chord angle) rows; -inf when infeasible."""
    rad = np.clip(params[:, 0], 0.0, 1.0)
    r0 = rad[:, None] * np.stack([np.cos(params[:, 1]), np.sin(params[:, 1])], axis=1)
    s = (r[None, :] - Q * r0) / (1.0 - Q)
    s2 = np.sum(s * s, axis=1)
    d = np.stack([np.cos(params[:, 2]), np.sin(params[:, 2])], axis=1)
    sd = np.sum(s * d, axis=1)
    disc = np.sqrt(np.clip(sd * sd + 1.0 - s2, 0.0, None))
    tp, tm = -sd + disc, -sd - disc
    z1 = s[:, 0] + tp * d[:, 0]
    z2 = s[:, 0] + tm * d[:, 0]
    span = tp - tm
    lam = np.where(span > 1e-15, -tm / np.where(span > 1e-15, span, 1.0), 0.5)
    val = (1.0 - Q) * (lam * (1 + np.abs(z1)) + (1 - lam) * (1 + np.abs(z2))) / 2
    return np.where(s2 <= 1.0, val, -np.inf)


def frio_oracle_qubit(
    b: BlochQubit, Q: float, restarts: int = 200, seed: int = 0, min_step: float = 1e-10
) -> float:
    """Randomised lower bound on the fixed-inconclusive-rate guessing probability.

    A decomposition is parameterised in the plane of the Bloch vector by the
    inconclusive state's radius and angle and the direction of a chord
    through the remaining conclusive part.  The chord's endpoints are pure
    states, each guessed as its likelier outcome.  ``restarts`` random
    starting points are improved together by compass search.
    """
    if not 0.0 <= Q < 1.0:
        raise ValueError("Q must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    r = np.array([b.m, b.p])
    x = np.column_stack(
        [
            np.sqrt(rng.uniform(0, 1, restarts)),
            rng.uniform(0, 2 * np.pi, restarts),
            rng.uniform(0, np.pi, restarts),
        ]
    )
    # the unit inconclusive vector along x is always feasible for Q below Q_max
    x[0] = [1.0, np.pi / 2, 0.0]
    fx = _frio_objective(x, r, Q)
    step = np.full(restarts, 0.25)
    scale = np.array([1.0, np.pi, np.pi])
    while np.any(step > min_step):
        moved = np.zeros(restarts, dtype=bool)
        for k in range(3):
            for sign in (1.0, -1.0):
                trial = x.copy()
                trial[:, k] += sign * step * scale[k]
                ft = _frio_objective(trial, r, Q)
                better = ft > fx
                x[better], fx[better] = trial[better], ft[better]
                moved |= better
        step = np.where(moved, step, step * 0.5)
    return float(np.max(fx))


# ---------------------------------------------------------------- simulation


@dataclass(frozen=True)
class SimulationStats:
    rounds: int
    correct: int
    wrong: int
    inconclusive: int
    seed: int

    def __post_init__(self):
        if self.correct + self.wrong + self.inconclusive != self.rounds:
            raise ValueError("outcome counts do not add up to the number of rounds")

    @property
    def empirical_guess_rate(self) -> float:
        return self.correct / self.rounds

    @property
    def error_rate(self) -> float:
        return self.wrong / self.rounds

    @property
    def inconclusive_rate(self) -> float:
        return self.inconclusive / self.rounds

    def as_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "correct": self.correct,
            "wrong": self.wrong,
            "inconclusive": self.inconclusive,
            "guess_rate": self.empirical_guess_rate,
            "error_rate": self.error_rate,
            "inconclusive_rate": self.inconclusive_rate,
            "seed": self.seed,
        }


def binomial_sigma(p: float, rounds: int) -> float:
    return float(np.sqrt(max(p * (1 - p), 0.0) / rounds))


def spawn_seeds(seed: int, n: int) -> list[np.random.SeedSequence]:
    """Independent child streams for parallel sweeps."""
    return np.random.SeedSequence(seed).spawn(n)


def _probabilities(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    p = np.where(p < BORN_FLOOR, 0.0, p)
    return p / p.sum()


def _score(rng, cells, rounds, seed) -> SimulationStats:
    """Sample ``rounds`` draws over (weight, outcome distribution, guess) cells."""
    weights = _probabilities([c[0] for c in cells])
    n = rng.multinomial(rounds, weights)
    correct = wrong = inconclusive = 0
    for count, (_, probs, guess) in zip(n, cells):
        if count == 0:
            continue
        if guess == 0:
            inconclusive += int(count)
            continue
        outcomes = rng.multinomial(count, _probabilities(probs))
        hit = int(outcomes[guess - 1])
        correct += hit
        wrong += int(count) - hit
    return SimulationStats(int(rounds), correct, wrong, inconclusive, int(seed))


def simulate_rounds(
    D: Decomposition,
    M: Povm,
    guess_rule: Sequence[int] | None = None,
    rounds: int = 100_000,
    seed: int = 0,
) -> SimulationStats:
    """Simulate the eavesdropper who knows which component was prepared.

    Parameters
    ----------
    guess_rule : sequence of int, optional
        Label guessed for each component: 0 for inconclusive, ``j`` for
        outcome ``j - 1``.  Defaults to component ``k`` guessing label ``k``.
    """
    if guess_rule is None:
        guess_rule = list(range(D.n_components))
    if len(guess_rule) != D.n_components:
        raise ValueError("need one guess label per component")
    if any(g < 0 or g > M.n_outcomes for g in guess_rule):
        raise ValueError(f"guess labels must lie in 0..{M.n_outcomes}")
    rng = np.random.default_rng(seed)
    cells = [(w, born(s, M), g) for w, s, g in zip(D.weights, D.states, guess_rule)]
    return _score(rng, cells, rounds, seed)


def simulate_joint_rounds(JD, rounds: int = 100_000, seed: int = 0) -> SimulationStats:
    """Simulate a joint state-and-measurement strategy.

    Each round draws labels ``(mu, nu)``, Alice's outcome from
    ``<psi_mu|N_{x,nu}|psi_mu>`` and scores the guess ``f(mu, nu)``.
    """
    rng = np.random.default_rng(seed)
    cells = []
    for mu in range(JD.weights.shape[0]):
        psi = JD.states[mu]
        for nu in range(JD.weights.shape[1]):
            w = JD.weights[mu, nu]
            probs = [float(np.real(psi.conj() @ N @ psi)) for N in JD.povms[nu]]
            cells.append((w, probs, int(JD.guess[mu, nu])))
    return _score(rng, cells, rounds, seed)
