"""Aaronson-Gottesman stabilizer tableau, used as an independent check of the frame simulator.

Only Clifford operations are supported. Measurements return the actual
outcome (0 for +1), drawn at random when the outcome is not determined.
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit
from .pauli import PauliString


class NonCliffordError(ValueError):
    pass


class Tableau:
    def __init__(self, n: int, rng: np.random.Generator | None = None) -> None:
        self.n = n
        self.rng = rng or np.random.default_rng()
        # rows 0..n-1 destabilizers, n..2n-1 stabilizers; state |0...0>
        self.x = np.zeros((2 * n, n), dtype=bool)
        self.z = np.zeros((2 * n, n), dtype=bool)
        self.r = np.zeros(2 * n, dtype=bool)
        for i in range(n):
            self.x[i, i] = True
            self.z[n + i, i] = True

    # gates -------------------------------------------------------------------

    def h(self, a: int) -> None:
        self.r ^= self.x[:, a] & self.z[:, a]
        self.x[:, a], self.z[:, a] = self.z[:, a].copy(), self.x[:, a].copy()

    def s(self, a: int) -> None:
        self.r ^= self.x[:, a] & self.z[:, a]
        self.z[:, a] ^= self.x[:, a]

    def cnot(self, a: int, b: int) -> None:
        self.r ^= self.x[:, a] & self.z[:, b] & ~(self.x[:, b] ^ self.z[:, a])
        self.x[:, b] ^= self.x[:, a]
        self.z[:, a] ^= self.z[:, b]

    def cz(self, a: int, b: int) -> None:
        self.h(b)
        self.cnot(a, b)
        self.h(b)

    def pauli(self, e: PauliString) -> None:
        ex, ez = e.to_arrays()
        # X_q flips rows with Z on q, Z_q flips rows with X on q
        self.r ^= (self.z[:, ex].sum(axis=1) + self.x[:, ez].sum(axis=1)) % 2 == 1

    # row algebra -------------------------------------------------------------

    @staticmethod
    def _g(x1, z1, x2, z2):
        x1 = x1.astype(np.int64)
        z1 = z1.astype(np.int64)
        x2 = x2.astype(np.int64)
        z2 = z2.astype(np.int64)
        return np.where(
            (x1 == 0) & (z1 == 0), 0,
            np.where((x1 == 1) & (z1 == 1), z2 - x2,
                     np.where(x1 == 1, z2 * (2 * x2 - 1), x2 * (1 - 2 * z2))),
        )

    def _rowsum(self, h: int, i: int) -> None:
        tot = 2 * int(self.r[h]) + 2 * int(self.r[i]) + int(self._g(self.x[i], self.z[i], self.x[h], self.z[h]).sum())
        self.r[h] = (tot % 4) == 2
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    # measurement -------------------------------------------------------------

    def measure_z(self, a: int, forced: int | None = None) -> int:
        n = self.n
        hits = np.flatnonzero(self.x[n:, a])
        if hits.size:
            p = n + int(hits[0])
            for i in range(2 * n):
                if i != p and self.x[i, a]:
                    self._rowsum(i, p)
            self.x[p - n], self.z[p - n], self.r[p - n] = self.x[p].copy(), self.z[p].copy(), self.r[p]
            self.x[p] = False
            self.z[p] = False
            self.z[p, a] = True
            out = int(self.rng.integers(2)) if forced is None else int(forced)
            self.r[p] = bool(out)
            return out
        # deterministic: accumulate into a scratch row
        sx = np.zeros(n, dtype=bool)
        sz = np.zeros(n, dtype=bool)
        sr = 0
        for i in np.flatnonzero(self.x[:n, a]):
            row = n + int(i)
            tot = 2 * sr + 2 * int(self.r[row]) + int(self._g(self.x[row], self.z[row], sx, sz).sum())
            sr = int((tot % 4) == 2)
            sx ^= self.x[row]
            sz ^= self.z[row]
        return sr

    def measure_x(self, a: int) -> int:
        self.h(a)
        out = self.measure_z(a)
        self.h(a)
        return out

    def reset_z(self, a: int) -> None:
        if self.measure_z(a):
            self.x_gate(a)

    def reset_x(self, a: int) -> None:
        self.reset_z(a)
        self.h(a)

    def x_gate(self, a: int) -> None:
        self.r ^= self.z[:, a]

    def z_gate(self, a: int) -> None:
        self.r ^= self.x[:, a]

    # queries -----------------------------------------------------------------

    def expectation(self, e: PauliString) -> int | None:
        """+1 or -1 if ``e`` (up to sign) is in the stabilizer group, else None."""
        n = self.n
        ex, ez = e.to_arrays()
        # anticommutes with some stabilizer -> not determined
        anti = (self.x[n:][:, ez].sum(axis=1) + self.z[n:][:, ex].sum(axis=1)) % 2
        if anti.any():
            return None
        # e = product of stabilizers whose destabilizer anticommutes with e
        sx = np.zeros(n, dtype=bool)
        sz = np.zeros(n, dtype=bool)
        sr = 0
        danti = (self.x[:n][:, ez].sum(axis=1) + self.z[:n][:, ex].sum(axis=1)) % 2
        for i in np.flatnonzero(danti):
            row = n + int(i)
            tot = 2 * sr + 2 * int(self.r[row]) + int(self._g(self.x[row], self.z[row], sx, sz).sum())
            sr = int((tot % 4) == 2)
            sx ^= self.x[row]
            sz ^= self.z[row]
        if not (np.array_equal(sx, ex) and np.array_equal(sz, ez)):
            return None
        return -1 if sr else 1


def run_circuit(
    circuit: Circuit,
    rng: np.random.Generator | None = None,
    paulis: dict[int, PauliString] | None = None,
    prep_h_as: str | None = None,
    tableau: Tableau | None = None,
) -> tuple[Tableau, list[int]]:
    """Noiseless run of a Clifford circuit; ``paulis`` maps a step to a Pauli applied after it.

    ``prep_h_as`` substitutes a stabilizer preparation for |H> preparations.
    A given ``tableau`` is continued in place instead of starting from |0...0>.
    """
    t = tableau if tableau is not None else Tableau(circuit.num_qubits, rng)
    outs: list[int] = []
    for s, step in enumerate(circuit.steps):
        for g in sorted(step, key=lambda g: g.qubits):
            a = g.qubits[0]
            k = g.kind
            if k == "prep_h" and prep_h_as is not None:
                k = prep_h_as
            if k == "prep_zero":
                t.reset_z(a)
            elif k == "prep_plus":
                t.reset_x(a)
            elif k in ("measure_z", "measure_x"):
                outs.append(t.measure_z(a) if k == "measure_z" else t.measure_x(a))
            elif k == "hadamard":
                t.h(a)
            elif k == "cnot":
                t.cnot(a, g.qubits[1])
            elif k == "cz":
                t.cz(a, g.qubits[1])
            elif k == "idle":
                pass
            else:
                raise NonCliffordError(k)
        if paulis and s in paulis:
            t.pauli(paulis[s])
    return t, outs
