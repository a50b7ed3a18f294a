"""Gate matrices, their Hermitian generators, and the timed-schedule format.

All gates are defined by their exponential forms (including any global
phases those produce); density-matrix evolution is insensitive to the
phases. hbar = 1 and the gate time tau = 1 are the units throughout.

Schedule transcription files are plain text, one gate per line:

    GATE <name> SITES <i[,j]> START <t> DUR <tau> PARAM <expr(alpha)>

plus ``TIME t1|t2|t3 <t>`` lines fixing the protocol checkpoints. PARAM is
an expression linear in ``alpha`` (``pi`` is available); its meaning is the
rotation angle for XX/RZ, the signed exponent for PSWAP, and a scale factor
(normally 1) for CNOT/HAD.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.linalg import expm, logm

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

# ln SWAP = (i pi / 2) * LN_SWAP_CORE
LN_SWAP_CORE = np.array(
    [[0, 0, 0, 0], [0, 1, -1, 0], [0, -1, 1, 0], [0, 0, 0, 0]], dtype=float
)

GENERATOR_ATOL = 1e-12


class ScheduleError(ValueError):
    """Malformed schedule transcription file."""


def xx_gate(phi: float) -> np.ndarray:
    """XX(phi) = exp[(i phi / 2) X (x) X]."""
    xx = np.kron(X, X)
    return np.cos(phi / 2) * np.eye(4, dtype=complex) + 1j * np.sin(phi / 2) * xx


def rz_gate(phi: float) -> np.ndarray:
    """R_Z(phi) = exp[(i phi / 2) Z] = diag(e^{i phi/2}, e^{-i phi/2})."""
    return np.diag([np.exp(1j * phi / 2), np.exp(-1j * phi / 2)])


def cnot_gate() -> np.ndarray:
    """CNOT = exp[(i pi / 4) (1 - Z) (x) (1 - X)]; first site is the control."""
    gen = np.kron(I2 - Z, I2 - X)
    return expm(1j * np.pi / 4 * gen)


def hadamard_gate() -> np.ndarray:
    """HAD = exp[(i pi / (2 sqrt 2)) (X + Z)]; equals i * H_textbook."""
    return expm(1j * np.pi / (2 * np.sqrt(2)) * (X + Z))


def param_swap(alpha: float, sign: int) -> np.ndarray:
    """Parametrized SWAP exp[sign * alpha * ln SWAP]; reaches SWAP at alpha=1."""
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    return expm(sign * alpha * (1j * np.pi / 2) * LN_SWAP_CORE)


def xx_generator(phi: float, tau: float = 1.0) -> np.ndarray:
    """Hermitian H with exp(-i H tau) = xx_gate(phi)."""
    return -(phi / (2 * tau)) * np.kron(X, X)


def rz_generator(phi: float, tau: float = 1.0) -> np.ndarray:
    return -(phi / (2 * tau)) * Z


def cnot_generator(tau: float = 1.0, scale: float = 1.0) -> np.ndarray:
    return -(scale * np.pi / (4 * tau)) * np.kron(I2 - Z, I2 - X)


def hadamard_generator(tau: float = 1.0, scale: float = 1.0) -> np.ndarray:
    return -(scale * np.pi / (2 * np.sqrt(2) * tau)) * (X + Z)


def param_swap_generator(exponent: float, tau: float = 4.0) -> np.ndarray:
    """Generator of exp[exponent * ln SWAP] applied over time tau."""
    return -(exponent * np.pi / (2 * tau)) * LN_SWAP_CORE


@dataclass
class GateSegment:
    """A timed Hermitian generator acting on listed sites over a duration.

    The segment's total unitary is exp(-i * generator * duration).
    """

    generator: np.ndarray
    sites: tuple[int, ...]
    start_time: float
    duration: float
    _step_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.generator = np.asarray(self.generator, dtype=complex)
        self.sites = tuple(int(s) for s in self.sites)
        dev = np.max(np.abs(self.generator - self.generator.conj().T))
        if dev > GENERATOR_ATOL:
            raise ValueError(f"generator not Hermitian (deviation {dev:.3e})")
        if self.duration <= 0:
            raise ValueError("segment duration must be positive")
        if self.generator.shape != (2 ** len(self.sites),) * 2:
            raise ValueError(
                f"generator shape {self.generator.shape} does not match "
                f"{len(self.sites)} site(s)"
            )

    @property
    def end_time(self) -> float:
        return self.start_time + self.duration

    def unitary(self) -> np.ndarray:
        """The full gate exp(-i * generator * duration)."""
        return expm(-1j * self.generator * self.duration)

    def step_unitary(self, dt: float) -> np.ndarray:
        """exp(-i * generator * dt), cached per dt."""
        u = self._step_cache.get(dt)
        if u is None:
            u = expm(-1j * self.generator * dt)
            self._step_cache[dt] = u
        return u

    def active_at(self, t: float, eps: float = 1e-9) -> bool:
        return self.start_time - eps <= t < self.end_time - eps


def segmentize(gate: np.ndarray, sites, start: float, tau: float) -> GateSegment:
    """Build the segment whose generator integrates to the given unitary.

    Uses the principal matrix logarithm: H = (i / tau) log(gate).
    """
    gate = np.asarray(gate, dtype=complex)
    if tau <= 0:
        raise ValueError("tau must be positive")
    dev = np.max(np.abs(gate @ gate.conj().T - np.eye(gate.shape[0])))
    if dev > 1e-10:
        raise ValueError(f"gate is not unitary (deviation {dev:.3e})")
    gen = (1j / tau) * logm(gate)
    gen = (gen + gen.conj().T) / 2  # strip the logm rounding skew
    return GateSegment(gen, tuple(sites), start, tau)


_PARAM_RE = re.compile(r"^[0-9a-z+\-*/(). ]+$")


def eval_param(expr: str, alpha: float) -> float:
    """Evaluate a PARAM expression over the names {alpha, pi}."""
    expr = expr.strip().lower()
    if not _PARAM_RE.match(expr):
        raise ScheduleError(f"illegal characters in PARAM expression {expr!r}")
    try:
        value = eval(expr, {"__builtins__": {}}, {"alpha": alpha, "pi": math.pi})
    except Exception as exc:
        raise ScheduleError(f"cannot evaluate PARAM expression {expr!r}: {exc}")
    return float(value)


@dataclass(frozen=True)
class ScheduleEntry:
    """One parsed line of a schedule transcription file."""

    name: str
    sites: tuple[int, ...]
    start: float
    duration: float
    param: str


@dataclass(frozen=True)
class ParsedSchedule:
    entries: tuple[ScheduleEntry, ...]
    t1: float
    t2: float
    t3: float


_GATE_NAMES = ("XX", "RZ", "CNOT", "HAD", "PSWAP")
_GATE_ARITY = {"XX": 2, "RZ": 1, "CNOT": 2, "HAD": 1, "PSWAP": 2}


def parse_schedule_text(text: str) -> ParsedSchedule:
    """Parse a schedule transcription file."""
    entries = []
    times = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "TIME":
            if len(tok) != 3 or tok[1] not in ("t1", "t2", "t3"):
                raise ScheduleError(f"line {lineno}: malformed TIME directive")
            times[tok[1]] = float(tok[2])
            continue
        if tok[0] != "GATE":
            raise ScheduleError(f"line {lineno}: expected GATE or TIME, got {tok[0]!r}")
        if (len(tok) != 10 or tok[2] != "SITES" or tok[4] != "START"
                or tok[6] != "DUR" or tok[8] != "PARAM"):
            raise ScheduleError(f"line {lineno}: malformed GATE line")
        name = tok[1]
        if name not in _GATE_NAMES:
            raise ScheduleError(f"line {lineno}: unknown gate {name!r}")
        sites = tuple(int(s) for s in tok[3].split(","))
        if len(sites) != _GATE_ARITY[name]:
            raise ScheduleError(
                f"line {lineno}: {name} takes {_GATE_ARITY[name]} site(s), "
                f"got {sites}"
            )
        entries.append(
            ScheduleEntry(name, sites, float(tok[5]), float(tok[7]), tok[9])
        )
    missing = {"t1", "t2", "t3"} - set(times)
    if missing:
        raise ScheduleError(f"missing TIME directives: {sorted(missing)}")
    return ParsedSchedule(tuple(entries), times["t1"], times["t2"], times["t3"])


def load_schedule(kind: str) -> ParsedSchedule:
    """Load a packaged schedule transcription file ('scrambling' or 'swap')."""
    path = resources.files(__package__) / "schedules" / f"{kind}.sched"
    return parse_schedule_text(path.read_text())


def entry_segment(entry: ScheduleEntry, alpha: float) -> GateSegment:
    """Instantiate one schedule entry at a given alpha."""
    p = eval_param(entry.param, alpha)
    tau = entry.duration
    if entry.name == "XX":
        gen = xx_generator(p, tau)
    elif entry.name == "RZ":
        gen = rz_generator(p, tau)
    elif entry.name == "CNOT":
        gen = cnot_generator(tau, p)
    elif entry.name == "HAD":
        gen = hadamard_generator(tau, p)
    else:
        gen = param_swap_generator(p, tau)
    return GateSegment(gen, entry.sites, entry.start, tau)


def _compose_window(parsed: ParsedSchedule, alpha: float, sites_subset,
                    site_map) -> np.ndarray:
    """Compose the encode-window gates on a 3-qubit register."""
    from .tensor_core import embed

    window = [e for e in parsed.entries
              if parsed.t1 - 1e-9 <= e.start < parsed.t2 - 1e-9
              and set(e.sites) <= set(sites_subset)]
    window.sort(key=lambda e: e.start)
    u = np.eye(8, dtype=complex)
    for e in window:
        seg = entry_segment(e, alpha)
        local = tuple(site_map[s] for s in seg.sites)
        u = embed(seg.unitary(), local, 3) @ u
    return u


def scrambling_unitary(alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """The 3-qubit scrambling encoder U(alpha) and its conjugate U*(alpha).

    The encoder acts on qubits (1,2,3); in the teleportation circuit the
    conjugate acts on qubits (6,5,4), i.e. in mirrored site order.
    """
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    parsed = load_schedule("scrambling")
    u = _compose_window(parsed, alpha, (1, 2, 3), {1: 1, 2: 2, 3: 3})
    return u, u.conj()


def swap_unitary(alpha: float) -> tuple[list[GateSegment], list[GateSegment]]:
    """Encoder and decoder segment sequences of the SWAP-based circuit."""
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    parsed = load_schedule("swap")
    enc, dec = [], []
    for e in parsed.entries:
        if e.name != "PSWAP":
            continue
        seg = entry_segment(e, alpha)
        (enc if set(e.sites) <= {1, 2, 3} else dec).append(seg)
    enc.sort(key=lambda s: s.start_time)
    dec.sort(key=lambda s: s.start_time)
    return enc, dec
