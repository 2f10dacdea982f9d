"""Riemannian ascent on products of unitary groups.

Objectives take a tuple of unitaries and return ``(value, grads)`` where
``grads[k]`` is the Euclidean gradient ``G_k`` in the sense
``df = Σ_k Re Tr[G_k† dU_k]``.  The Riemannian step direction at ``U`` is
the skew-Hermitian projection ``Ω = (G U† − U G†)/2`` and the update is
``U ← exp(t Ω) U``, so iterates stay exactly unitary.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_random_state
from .matcore import dagger, random_unitary

__all__ = ["UnitaryOptimizer", "OptimResult", "expm_skew"]


def expm_skew(omega):
    """``exp(Ω)`` for skew-Hermitian ``Ω`` via the eigendecomposition of ``iΩ``."""
    w, v = np.linalg.eigh(1j * omega)
    return (v * np.exp(-1j * w)) @ dagger(v)


@dataclass(frozen=True)
class OptimResult:
    value: float
    unitaries: tuple
    iterations: int
    restarts: int
    seed: object
    history: tuple


@dataclass(frozen=True)
class UnitaryOptimizer:
    """Monotone Armijo ascent with random restarts.

    Parameters
    ----------
    restarts : int
        Number of starting points (the supplied initial point counts as one).
    step : float
        Initial trial step.  Each iteration backtracks until the Armijo
        condition holds, then doubles the step while the objective keeps
        improving, or halves it if doubling does not help; the final step
        seeds the next iteration.
    tol : float
        Stop when the Riemannian gradient norm or the per-step gain drops
        below this.
    max_iter : int
        Iteration cap per start.
    seed : int or None
        Seed for the restart points.
    max_step : float
        Upper limit for the step length.
    """

    restarts: int = 8
    step: float = 0.5
    tol: float = 1e-10
    max_iter: int = 500
    seed: object = 0
    max_step: float = 16.0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")

    def _line_search(self, fun, us, omegas, val, gn2, t):
        """Armijo backtracking, then keep expanding or shrinking while the
        value improves (a cheap bracketing of the best step)."""

        def at(step):
            trial = tuple(expm_skew(step * o) @ u for o, u in zip(omegas, us))
            return (trial,) + tuple(fun(trial))

        cur = at(t)
        if cur[1] >= val + 1e-4 * t * gn2:
            grew = False
            while t < self.max_step:
                nxt = at(2 * t)
                if nxt[1] <= cur[1]:
                    break
                cur, t, grew = nxt, 2 * t, True
            if grew:
                return cur[0], cur[1], cur[2], t
        else:
            for _ in range(60):
                t /= 2
                cur = at(t)
                if cur[1] >= val + 1e-4 * t * gn2:
                    break
            else:
                return None, val, None, t
        while True:
            nxt = at(t / 2)
            if nxt[1] <= cur[1]:
                break
            cur, t = nxt, t / 2
        return cur[0], cur[1], cur[2], t

    def _ascend(self, fun, us):
        val, grads = fun(us)
        hist = [val]
        t = self.step
        it = 0
        for it in range(1, self.max_iter + 1):
            omegas = [(g @ dagger(u) - u @ dagger(g)) / 2 for g, u in zip(grads, us)]
            gn2 = sum(np.vdot(o, o).real for o in omegas)
            if np.sqrt(gn2) < self.tol:
                break
            trial, tv, tg, t = self._line_search(fun, us, omegas, val, gn2, t)
            if trial is None:
                break
            gain = tv - val
            us, val, grads = trial, tv, tg
            hist.append(val)
            if gain < self.tol * (1 + abs(val)):
                break
        return val, us, it, hist

    def maximize(self, fun, dims, init=None):
        """Best local maximum over ``restarts`` starts.

        ``dims`` lists the sizes of the unitary factors; ``init`` (optional)
        is the first starting point, the remaining ones are Haar random.
        """
        rng = check_random_state(self.seed)
        best = None
        for r in range(self.restarts):
            if r == 0 and init is not None:
                start = tuple(np.asarray(u, dtype=complex) for u in init)
            elif r == 0:
                start = tuple(np.eye(d, dtype=complex) for d in dims)
            else:
                start = tuple(random_unitary(d, rng) for d in dims)
            val, us, it, hist = self._ascend(fun, start)
            if best is None or val > best.value:
                best = OptimResult(float(val), us, it, r + 1, self.seed, tuple(hist))
        return best

    def minimize(self, fun, dims, init=None):
        def neg(us):
            v, g = fun(us)
            return -v, [-x for x in g]

        res = self.maximize(neg, dims, init)
        return OptimResult(
            -res.value,
            res.unitaries,
            res.iterations,
            res.restarts,
            res.seed,
            tuple(-h for h in res.history),
        )
