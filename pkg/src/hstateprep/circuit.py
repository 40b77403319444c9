"""Time-stepped circuit representation with typed fault locations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

PREP_KINDS = ("prep_zero", "prep_plus", "prep_h")
MEASURE_KINDS = ("measure_z", "measure_x", "measure_y")
SINGLE_KINDS = ("hadamard", "t_gate", "t_dagger")
TWO_KINDS = ("cnot", "cz")
GATE_KINDS = PREP_KINDS + MEASURE_KINDS + SINGLE_KINDS + TWO_KINDS + ("idle",)
ROLES = ("data", "ancilla", "flag")

_TEXT = {
    "prep_zero": "R",
    "prep_plus": "RX",
    "prep_h": "RH",
    "measure_z": "M",
    "measure_x": "MX",
    "measure_y": "MY",
    "hadamard": "H",
    "t_gate": "T",
    "t_dagger": "TDG",
    "cnot": "CNOT",
    "cz": "CZ",
    "idle": "I",
}
_FROM_TEXT = {v: k for k, v in _TEXT.items()}


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    tag: str = ""

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        arity = 2 if self.kind in TWO_KINDS else 1
        if len(self.qubits) != arity:
            raise CircuitError(f"{self.kind} takes {arity} qubit(s), got {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise CircuitError(f"{self.kind} on a repeated qubit {self.qubits}")


@dataclass(frozen=True)
class LocationIndex:
    step: int
    kind: str
    qubits: tuple[int, ...]
    tag: str = ""

    @property
    def noise_kind(self) -> str:
        return noise_kind(self.kind)


def noise_kind(kind: str) -> str:
    if kind in TWO_KINDS:
        return "two"
    if kind in SINGLE_KINDS:
        return "single"
    if kind in MEASURE_KINDS:
        return "measure"
    return kind  # prep_zero, prep_plus, prep_h, idle


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    qubit_roles: tuple[str, ...]
    steps: tuple[tuple[Gate, ...], ...] = ()
    name: str = ""
    _locations: list = field(default=None, init=False, repr=False, compare=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if len(self.qubit_roles) != self.num_qubits:
            raise CircuitError("one role per qubit required")
        for r in self.qubit_roles:
            if r not in ROLES:
                raise CircuitError(f"unknown role {r!r}")
        live = {q for q, r in enumerate(self.qubit_roles) if r == "data"}
        for s, step in enumerate(self.steps):
            used: set[int] = set()
            for g in step:
                for q in g.qubits:
                    if not 0 <= q < self.num_qubits:
                        raise CircuitError(f"qubit {q} out of range in step {s}")
                    if q in used:
                        raise CircuitError(f"qubit {q} used twice in step {s}")
                    used.add(q)
                if g.kind in PREP_KINDS:
                    live.add(g.qubits[0])
                elif g.kind in MEASURE_KINDS:
                    if g.qubits[0] not in live:
                        raise CircuitError(f"qubit {g.qubits[0]} measured before preparation (step {s})")
                    live.discard(g.qubits[0])
                else:
                    for q in g.qubits:
                        if q not in live:
                            raise CircuitError(f"gate {g.kind} on unprepared qubit {q} (step {s})")
        dangling = [q for q in live if self.qubit_roles[q] != "data"]
        if dangling:
            raise CircuitError(f"prepared qubits never measured: {sorted(dangling)}")

    # queries ----------------------------------------------------------------

    @property
    def depth(self) -> int:
        return len(self.steps)

    def locations(self) -> list[LocationIndex]:
        """Every faultable location, step-major; idles materialized for live qubits."""
        if self._locations is not None:
            return self._locations
        out: list[LocationIndex] = []
        live = {q for q, r in enumerate(self.qubit_roles) if r == "data"}
        for s, step in enumerate(self.steps):
            used: set[int] = set()
            for g in sorted(step, key=lambda g: g.qubits):
                out.append(LocationIndex(s, g.kind, g.qubits, g.tag))
                used.update(g.qubits)
            for q in sorted(live - used):
                out.append(LocationIndex(s, "idle", (q,)))
            for g in step:
                if g.kind in PREP_KINDS:
                    live.add(g.qubits[0])
                elif g.kind in MEASURE_KINDS:
                    live.discard(g.qubits[0])
        object.__setattr__(self, "_locations", out)
        return out

    def measurements(self) -> list[LocationIndex]:
        """Measurement locations in outcome order (the order of ``locations``)."""
        return [loc for loc in self.locations() if loc.kind in MEASURE_KINDS]

    def measurement_index(self) -> dict[str, list[int]]:
        """Outcome positions grouped by tag."""
        out: dict[str, list[int]] = {}
        for i, loc in enumerate(self.measurements()):
            out.setdefault(loc.tag, []).append(i)
        return out

    def qubits_with_role(self, role: str) -> list[int]:
        return [q for q, r in enumerate(self.qubit_roles) if r == role]

    # text format ------------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"# qubits {self.num_qubits}", "# roles " + " ".join(r[0] for r in self.qubit_roles)]
        if self.name:
            lines.insert(0, f"# name {self.name}")
        for step in self.steps:
            toks = []
            for g in step:
                t = _TEXT[g.kind] + " " + " ".join(str(q + 1) for q in g.qubits)
                if g.tag:
                    t += f" @{g.tag}"
                toks.append(t)
            lines.append("; ".join(toks))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        name, nq, roles, steps = "", None, None, []
        role_of = {"d": "data", "a": "ancilla", "f": "flag"}
        for raw in text.splitlines():
            line = raw.strip()
            if line.startswith("#"):
                parts = line[1:].split()
                if parts and parts[0] == "qubits":
                    nq = int(parts[1])
                elif parts and parts[0] == "roles":
                    roles = tuple(role_of[p] for p in parts[1:])
                elif parts and parts[0] == "name":
                    name = " ".join(parts[1:])
                continue
            gates = []
            for tok in filter(None, (t.strip() for t in line.split(";"))):
                tag = ""
                if "@" in tok:
                    tok, tag = tok.split("@", 1)
                    tag = tag.strip()
                parts = tok.split()
                if parts[0] not in _FROM_TEXT:
                    raise CircuitError(f"unknown gate token {parts[0]!r}")
                gates.append(Gate(_FROM_TEXT[parts[0]], tuple(int(p) - 1 for p in parts[1:]), tag))
            steps.append(tuple(gates))
        if nq is None or roles is None:
            raise CircuitError("missing '# qubits' or '# roles' header")
        return cls(nq, roles, tuple(steps), name)


def concatenate(*circuits: Circuit, name: str = "", prefix_tags: bool = False) -> Circuit:
    """Run circuits back to back on one register.

    Data roles must agree; other roles come from the first circuit, since
    H_m and EC swap which gadget qubits act as flags. With ``prefix_tags``
    every tag becomes ``"<segment>/<tag>"`` so repeated rounds stay apart.
    """
    first = circuits[0]
    data = first.qubits_with_role("data")
    for c in circuits[1:]:
        if c.num_qubits != first.num_qubits or c.qubits_with_role("data") != data:
            raise CircuitError("can only concatenate circuits on the same register")
    steps = []
    for i, c in enumerate(circuits):
        for step in c.steps:
            if prefix_tags:
                step = tuple(Gate(g.kind, g.qubits, f"{i}/{g.tag}" if g.tag else "") for g in step)
            steps.append(step)
    return Circuit(first.num_qubits, first.qubit_roles, tuple(steps), name or "+".join(c.name for c in circuits))


class CircuitBuilder:
    """Accumulates gates into explicit time steps."""

    def __init__(self, roles: Sequence[str], name: str = "") -> None:
        self.roles = tuple(roles)
        self.name = name
        self.steps: list[list[Gate]] = []

    def step(self, gates: Iterable[Gate] = ()) -> "CircuitBuilder":
        self.steps.append(list(gates))
        return self

    def at(self, t: int, gate: Gate) -> None:
        while len(self.steps) <= t:
            self.steps.append([])
        self.steps[t].append(gate)

    def build(self) -> Circuit:
        return Circuit(len(self.roles), self.roles, tuple(tuple(s) for s in self.steps), self.name)
