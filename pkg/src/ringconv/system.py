"""Input/state/output representations ``(A, B, C, D)`` over Z/p^r.

The encoder runs

    x[t+1] = A x[t] + B u[t]
    y[t]   = C x[t] + D u[t]

from ``x[0] = 0`` and emits the symbol ``(y[t], u[t])`` (outputs first)
at every step.  A sequence is a codeword when the state is back at zero
after its last symbol.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_ring_array
from .exceptions import ConditionViolated, Inconsistent, NotDivisible, Unreachable
from .linalg import identity, is_injective, is_surjective, lift_solve, mat_mul, mat_pow, rank_mod_p
from .poly import PolyEncoder, poly_to_time
from .ring import RingParams


@dataclass(frozen=True)
class Trajectory:
    """States ``x[0..g+1]``, inputs ``u[0..g]`` and outputs ``y[0..g]``."""

    states: np.ndarray
    inputs: np.ndarray
    outputs: np.ndarray

    def __len__(self):
        return self.inputs.shape[0]

    @property
    def symbols(self) -> np.ndarray:
        """Codeword symbols ``(y[t], u[t])`` as rows."""
        return np.hstack([self.outputs, self.inputs])

    @property
    def terminated(self) -> bool:
        return not np.any(self.states[-1])


@dataclass(frozen=True)
class FirstOrderRep:
    """Matrices with ``z K x(z) + L x(z) + M v(z) = 0`` describing the code."""

    K: np.ndarray
    L: np.ndarray
    M: np.ndarray


class IsoSystem:
    """A linear system ``(A, B, C, D)`` over Z/p^r.

    Shapes: ``A`` is delta x delta, ``B`` delta x k, ``C`` (n-k) x delta and
    ``D`` (n-k) x k.  Entries are reduced mod p^r on construction.
    """

    def __init__(self, A, B, C, D, ring: RingParams):
        self.ring = ring
        self.A = check_ring_array(A, ring, ndim=2, name="A")
        self.B = check_ring_array(B, ring, ndim=2, name="B")
        self.C = check_ring_array(C, ring, ndim=2, name="C")
        self.D = check_ring_array(D, ring, ndim=2, name="D")
        delta = self.A.shape[0]
        if self.A.shape != (delta, delta):
            raise ValueError(f"A must be square, got {self.A.shape}")
        if self.B.shape[0] != delta or self.C.shape[1] != delta:
            raise ValueError("B rows and C columns must equal the state dimension")
        if self.D.shape != (self.C.shape[0], self.B.shape[1]):
            raise ValueError(f"D must be {(self.C.shape[0], self.B.shape[1])}, got {self.D.shape}")
        for m in (self.A, self.B, self.C, self.D):
            m.setflags(write=False)
        # (x, u) -> (A x + B u, C x + D u) as one block product per step
        self._step = np.block([[self.A, self.B], [self.C, self.D]])
        self._step.setflags(write=False)

    @property
    def delta(self) -> int:
        return self.A.shape[0]

    @property
    def k(self) -> int:
        return self.B.shape[1]

    @property
    def n(self) -> int:
        return self.C.shape[0] + self.B.shape[1]

    @property
    def outputs(self) -> int:
        return self.C.shape[0]

    def __repr__(self):
        return f"IsoSystem(delta={self.delta}, k={self.k}, n={self.n}, ring={self.ring})"

    def __eq__(self, other):
        return (isinstance(other, IsoSystem) and self.ring == other.ring
                and all(np.array_equal(a, b) for a, b in
                        zip((self.A, self.B, self.C, self.D), (other.A, other.B, other.C, other.D))))

    __hash__ = None

    # -- structural matrices -------------------------------------------------

    def reachability_matrix(self, l: int) -> np.ndarray:
        """``(A^{l-1} B, ..., A B, B)``, shape delta x l*k."""
        if l < 1:
            raise ValueError("l must be >= 1")
        blocks = [self.B]
        for _ in range(l - 1):
            blocks.append(mat_mul(self.A, blocks[-1], self.ring))
        return np.hstack(blocks[::-1])

    def observability_matrix(self, l: int) -> np.ndarray:
        """``(C; C A; ...; C A^{l-1})``, shape l*(n-k) x delta."""
        if l < 1:
            raise ValueError("l must be >= 1")
        blocks = [self.C]
        for _ in range(l - 1):
            blocks.append(mat_mul(blocks[-1], self.A, self.ring))
        return np.vstack(blocks)

    def markov_toeplitz(self, theta: int) -> np.ndarray:
        """Block lower-triangular map from ``theta`` inputs to ``theta`` outputs at zero state."""
        if theta < 1:
            raise ValueError("theta must be >= 1")
        q, k = self.outputs, self.k
        markov = [self.D]
        cab = self.C
        for _ in range(theta - 1):
            markov.append(mat_mul(cab, self.B, self.ring))
            cab = mat_mul(cab, self.A, self.ring)
        out = np.zeros((theta * q, theta * k), dtype=np.int64)
        for i in range(theta):
            for j in range(i + 1):
                out[i * q:(i + 1) * q, j * k:(j + 1) * k] = markov[i - j]
        return out

    def a_invertible(self) -> bool:
        return rank_mod_p(self.A, self.ring) == self.delta

    def is_reachable(self) -> bool:
        return self.delta == 0 or is_surjective(self.reachability_matrix(self.delta), self.ring)

    def is_observable(self) -> bool:
        return self.delta == 0 or is_injective(self.observability_matrix(self.delta), self.ring)

    # -- trajectories --------------------------------------------------------

    def simulate(self, inputs, x0=None) -> Trajectory:
        """Run the recurrence on ``inputs`` (rows are u[t]) from ``x0`` (default 0)."""
        ring = self.ring
        inputs = check_ring_array(inputs, ring, name="inputs").reshape(-1, self.k)
        x = np.zeros(self.delta, dtype=np.int64) if x0 is None else check_ring_array(
            x0, ring, shape=(self.delta,), name="x0")
        steps = inputs.shape[0]
        states = np.zeros((steps + 1, self.delta), dtype=np.int64)
        outputs = np.zeros((steps, self.outputs), dtype=np.int64)
        states[0] = x
        for t in range(steps):
            nxt = mat_mul(self._step, np.concatenate([states[t], inputs[t]]), ring)
            states[t + 1] = nxt[: self.delta]
            outputs[t] = nxt[self.delta:]
        return Trajectory(states, inputs, outputs)

    def steer_to_zero(self, x) -> np.ndarray:
        """``delta`` inputs (rows) that drive state ``x`` to zero.

        Solves ``Phi_delta U = -A^delta x`` by p-adic lifting.
        """
        if self.delta == 0:
            return np.zeros((0, self.k), dtype=np.int64)
        x = check_ring_array(x, self.ring, shape=(self.delta,), name="x")
        phi = self.reachability_matrix(self.delta)
        if not is_surjective(phi, self.ring):
            raise Unreachable("reachability matrix is not surjective")
        target = (-mat_mul(mat_pow(self.A, self.delta, self.ring), x, self.ring)) % self.ring.modulus
        try:
            u = lift_solve(phi, target, self.ring)
        except (Inconsistent, NotDivisible) as exc:
            raise Unreachable(str(exc)) from exc
        return u.reshape(self.delta, self.k)

    def encode_stream(self, inputs, terminate: bool = True) -> Trajectory:
        """Encode from the zero state; with ``terminate`` append the steering tail."""
        inputs = check_ring_array(inputs, self.ring, name="inputs").reshape(-1, self.k)
        if terminate and self.delta:
            head = self.simulate(inputs)
            inputs = np.vstack([inputs, self.steer_to_zero(head.states[-1])])
        traj = self.simulate(inputs)
        if terminate:
            assert not np.any(traj.states[-1]), "steering did not reach the zero state"
        return traj

    def membership_check(self, symbols) -> bool:
        """Whether a time-ordered symbol sequence ``(y[t], u[t])`` is a codeword."""
        v = check_ring_array(symbols, self.ring, name="symbols").reshape(-1, self.n)
        traj = self.simulate(v[:, self.outputs:])
        return bool(np.array_equal(traj.outputs, v[:, :self.outputs]) and traj.terminated)

    # -- first-order representation -----------------------------------------

    def first_order_rep(self) -> FirstOrderRep:
        """Assemble ``(K, L, M)`` and verify it is a minimal representation.

        Checked: ``K`` injective; ``(K | M)`` surjective; ``(zK + L | M)``
        surjective for every ``z``; ``zK + L`` injective for every ``z``.
        The last two are decided exactly through the reachability and
        observability matrices; evaluations at the points of F_p are used
        to name a witness when one exists.
        """
        ring, d, q, k = self.ring, self.delta, self.outputs, self.k
        mod = ring.modulus
        K = np.vstack([(-identity(d)) % mod, np.zeros((q, d), dtype=np.int64)])
        L = np.vstack([self.A, self.C])
        M = np.block([[np.zeros((d, q), dtype=np.int64), self.B],
                      [(-identity(q)) % mod, self.D]])
        if not is_injective(K, ring):
            raise ConditionViolated("K injective")
        if not is_surjective(np.hstack([K, M]), ring):
            raise ConditionViolated("(K, M) surjective")
        for z0 in range(ring.p):
            pencil = (z0 * K + L) % mod
            if not is_surjective(np.hstack([pencil, M]), ring):
                raise ConditionViolated("(zK+L, M) surjective",
                                        f"(zK+L, M) loses rank at z = {z0}")
            if not is_injective(pencil, ring):
                raise ConditionViolated("zK+L injective", f"zK+L loses rank at z = {z0}")
        if not self.is_reachable():
            raise ConditionViolated("(zK+L, M) surjective",
                                    "(zK+L, M) loses rank at a point outside F_p")
        if not self.is_observable():
            raise ConditionViolated("zK+L injective",
                                    "zK+L loses rank at a point outside F_p")
        return FirstOrderRep(K, L, M)


def reachability_matrix(s: IsoSystem, l: int) -> np.ndarray:
    return s.reachability_matrix(l)


def observability_matrix(s: IsoSystem, l: int) -> np.ndarray:
    return s.observability_matrix(l)


def markov_toeplitz(s: IsoSystem, theta: int) -> np.ndarray:
    return s.markov_toeplitz(theta)


def encode_stream(s: IsoSystem, inputs, terminate: bool = True) -> Trajectory:
    return s.encode_stream(inputs, terminate)


def steer_to_zero(s: IsoSystem, x) -> np.ndarray:
    return s.steer_to_zero(x)


def first_order_rep(s: IsoSystem) -> FirstOrderRep:
    return s.first_order_rep()


def membership_check(s: IsoSystem, symbols) -> bool:
    return s.membership_check(symbols)


def check_encoder_consistency(s: IsoSystem, g: PolyEncoder, max_deg: int) -> bool:
    """Every ``G(z) u(z)`` with ``deg u <= max_deg`` is a codeword of ``s``.

    ``g`` must list output rows before input rows.
    """
    if (g.n, g.k) != (s.n, s.k) or g.ring != s.ring:
        return False
    return all(s.membership_check(poly_to_time(g.encode(u))) for u in g.messages(max_deg))


class SystemEncoder(BaseEstimator, TransformerMixin):
    """Transformer mapping message rows ``u[t]`` to codeword symbols ``(y[t], u[t])``.

    Parameters
    ----------
    system : IsoSystem
    terminate : bool, default True
        Append ``delta`` steering steps so the sequence ends in the zero state.
    """

    def __init__(self, system=None, terminate=True):
        self.system = system
        self.terminate = terminate

    def fit(self, X=None, y=None):
        if not isinstance(self.system, IsoSystem):
            raise TypeError("system must be an IsoSystem")
        if self.terminate and not self.system.is_reachable():
            raise Unreachable("termination needs a reachable system")
        self.n_features_in_ = self.system.k
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        return self.system.encode_stream(X, terminate=self.terminate).symbols

    def inverse_transform(self, X):
        """Message rows from codeword symbols, dropping the steering tail."""
        check_is_fitted(self, "n_features_in_")
        s = self.system
        X = check_ring_array(X, s.ring, ndim=2, name="X")
        inputs = X[:, s.outputs:]
        return inputs[: len(inputs) - s.delta] if self.terminate else inputs
