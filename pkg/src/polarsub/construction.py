"""Randomized polar subcode construction.

A code is defined by a constraint matrix whose rows freeze input symbols:
each row "ends" at the position it freezes (its last set column), and the
frozen symbol equals the GF(2) inner product of the row with all earlier
inputs.  Four row families are laid down in order:

  1. shortening rows -- identity block freezing inputs n..2^m-1 to zero,
  2. low-weight-killing rows ("dfca") -- each ends at an otherwise-unfrozen
     position of small binary weight and carries random coefficients on the
     unfrozen positions to its left, removing most minimum-weight codewords,
  3. static rows -- a single 1 at each remaining frozen position,
  4. path-penalty rows ("dfcb") -- each ends at one of the most reliable
     would-be-frozen positions, again with random coefficients, so that a
     list decoder punishes wrong paths early.

All randomness comes from a splitmix64 stream, so (n, k, t, q, seed,
design channel) pins the code bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import transform
from .gf2 import BitVec, GF2Matrix, last_set_position
from .reliability import ChannelModel, evolve_reliabilities, order_by_reliability

SPEC_MAGIC = "polar-subcode-v1"

ROLE_SHORT = "short"
ROLE_DFCA = "dfca"
ROLE_STATIC = "static"
ROLE_DFCB = "dfcb"
_ROLES = (ROLE_SHORT, ROLE_DFCA, ROLE_STATIC, ROLE_DFCB)

_MASK64 = (1 << 64) - 1

# default cap on the total number of randomized constraints
RANDOM_CONSTRAINT_BUDGET = 64


class SpecFormatError(ValueError):
    """Raised when a code-spec file is malformed or violates invariants."""


class ConstructionRng:
    """splitmix64 stream consumed one bit at a time, LSB first.

    `calls` counts raw 64-bit outputs drawn, which the construction-cost
    check reads.
    """

    __slots__ = ("state", "calls", "_buf", "_left")

    def __init__(self, seed: int):
        self.state = seed & _MASK64
        self.calls = 0
        self._buf = 0
        self._left = 0

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        z ^= z >> 31
        self.calls += 1
        return z

    def next_bit(self) -> int:
        if self._left == 0:
            self._buf = self.next_u64()
            self._left = 64
        bit = self._buf & 1
        self._buf >>= 1
        self._left -= 1
        return bit


def default_params(n: int, k: int, t: int | None = None) -> tuple[int, int]:
    """Default count of each randomized-constraint family for an (n, k) code.

    t defaults to min(ceil(log2 n), n-k); q tops the total up to the budget
    without exceeding the n-k freezing constraints available.
    """
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n}, k={k}")
    m = (n - 1).bit_length()
    if t is None:
        t = min(m, n - k)
    q = max(0, min(RANDOM_CONSTRAINT_BUDGET - t, n - k - t))
    return t, q


@dataclass
class CodeSpec:
    """Complete, reproducible description of one randomized polar subcode."""

    m: int
    n: int
    k: int
    t: int
    q: int
    seed: int
    design_channel: ChannelModel
    constraints: GF2Matrix
    row_roles: list[str]
    row_terminus: np.ndarray
    prng_calls: int | None = None

    def __post_init__(self):
        full = 1 << self.m
        if self.constraints.n_rows != full - self.k or self.constraints.n_cols != full:
            raise SpecFormatError("constraint matrix has wrong shape")
        if len(self.row_roles) != self.constraints.n_rows:
            raise SpecFormatError("row role count mismatch")
        term = np.asarray(self.row_terminus, dtype=np.int64)
        if term.shape != (self.constraints.n_rows,):
            raise SpecFormatError("row terminus count mismatch")
        if len(set(term.tolist())) != term.size:
            raise SpecFormatError("constraint rows must end in distinct columns")
        self.row_terminus = term

    @property
    def full_length(self) -> int:
        return 1 << self.m

    @cached_property
    def frozen_positions(self) -> np.ndarray:
        """All frozen input positions (row termini), ascending."""
        return np.sort(self.row_terminus)

    @cached_property
    def info_positions(self) -> np.ndarray:
        """Input positions carrying message bits, ascending."""
        mask = np.ones(self.full_length, dtype=bool)
        mask[self.row_terminus] = False
        return np.nonzero(mask)[0]

    @cached_property
    def _row_supports(self) -> list[np.ndarray]:
        """Per-row set columns strictly left of the terminus, ascending."""
        bits = self.constraints.to_array()
        out = []
        for r in range(self.constraints.n_rows):
            cols = np.nonzero(bits[r])[0]
            out.append(cols[cols < self.row_terminus[r]].astype(np.int64))
        return out

    @cached_property
    def _frozen_row_of(self) -> dict[int, int]:
        return {int(tm): r for r, tm in enumerate(self.row_terminus)}

    def expand_message(self, msg: np.ndarray) -> np.ndarray:
        """Fill the full input vector: message bits plus forced frozen values."""
        msg = np.asarray(msg, dtype=np.uint8)
        if msg.shape != (self.k,):
            raise ValueError(f"message must have length {self.k}")
        u = np.zeros(self.full_length, dtype=np.uint8)
        u[self.info_positions] = msg
        for tm in self.frozen_positions:
            sup = self._row_supports[self._frozen_row_of[int(tm)]]
            if sup.size:
                u[tm] = np.bitwise_xor.reduce(u[sup])
        return u

    @cached_property
    def message_matrix(self) -> np.ndarray:
        """(k, 2^m) map from message bits to full input vectors."""
        rows = np.zeros((self.k, self.full_length), dtype=np.uint8)
        eye = np.eye(self.k, dtype=np.uint8)
        for i in range(self.k):
            rows[i] = self.expand_message(eye[i])
        rows.setflags(write=False)
        return rows

    @cached_property
    def generator_matrix(self) -> np.ndarray:
        """(k, n) codeword generator, rows = encodings of unit messages."""
        g = transform.shorten_output(transform.encode(self.message_matrix), self.n)
        g.setflags(write=False)
        return g

    def check_input_vector(self, u: np.ndarray) -> bool:
        """True iff a full input vector satisfies every constraint row."""
        u = np.asarray(u, dtype=np.uint8)
        bits = self.constraints.to_array()
        return not np.any((bits @ u.astype(np.int64)) % 2)


def encode_message(spec: CodeSpec, msg: np.ndarray) -> np.ndarray:
    """Message bits -> length-n codeword."""
    u = spec.expand_message(msg)
    return transform.shorten_output(transform.encode(u), spec.n)


def design_sets(n: int, k: int, t: int, q: int, channel: ChannelModel):
    """Reliability-driven index sets used by the construction.

    Returns (frozen, unfrozen, penalty_targets, static_set, killer_targets):
    frozen = n-k-t least reliable positions; penalty_targets = its q most
    reliable members; killer_targets = t maximal unfrozen indices taken by
    increasing binary weight starting from the minimum weight present.
    """
    m = (n - 1).bit_length()
    profile = evolve_reliabilities(channel, m, n)
    order = order_by_reliability(profile, n)
    n_frozen = n - k - t
    frozen = order[:n_frozen]
    penalty_targets = np.sort(frozen[n_frozen - q :]) if q else np.array([], dtype=np.int64)
    static_set = np.sort(frozen[: n_frozen - q])
    unfrozen = np.setdiff1d(np.arange(n), frozen)

    weights = np.array([int(i).bit_count() for i in unfrozen])
    killers: list[int] = []
    for w in sorted(set(weights.tolist())):
        members = sorted(unfrozen[weights == w].tolist(), reverse=True)
        for z in members:
            if len(killers) == t:
                break
            killers.append(z)
        if len(killers) == t:
            break
    return np.sort(frozen), unfrozen, penalty_targets, static_set, np.array(killers, dtype=np.int64)


def construct(
    n: int,
    k: int,
    t: int | None = None,
    q: int | None = None,
    seed: int = 0,
    channel: ChannelModel | None = None,
    design_ebno_db: float = 1.5,
) -> CodeSpec:
    """Build the constraint matrix for an (n, k) randomized polar subcode."""
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n}, k={k}")
    m = (n - 1).bit_length()
    full = 1 << m
    if t is None or q is None:
        td, qd = default_params(n, k, t)
        t = td if t is None else t
        q = qd if q is None else q
    if t < 0 or q < 0 or t + q > n - k:
        raise ValueError(f"need t, q >= 0 and t + q <= n - k, got t={t}, q={q}")
    if channel is None:
        channel = ChannelModel(ebno_db=design_ebno_db, rate=k / n)

    frozen, unfrozen, penalty_targets, static_set, killers = design_sets(n, k, t, q, channel)

    rng = ConstructionRng(seed)
    matrix = GF2Matrix(full - k, full)
    roles: list[str] = []
    termini: list[int] = []
    row = 0

    for i in range(full - n):
        matrix.set(row, n + i)
        roles.append(ROLE_SHORT)
        termini.append(n + i)
        row += 1

    for z in killers:
        matrix.set(row, int(z))
        for i in unfrozen[unfrozen < z]:
            if rng.next_bit():
                matrix.set(row, int(i))
        roles.append(ROLE_DFCA)
        termini.append(int(z))
        row += 1

    for f in static_set:
        matrix.set(row, int(f))
        roles.append(ROLE_STATIC)
        termini.append(int(f))
        row += 1

    for f in penalty_targets:
        matrix.set(row, int(f))
        for j in unfrozen[unfrozen < f]:
            if rng.next_bit():
                matrix.set(row, int(j))
        roles.append(ROLE_DFCB)
        termini.append(int(f))
        row += 1

    return CodeSpec(
        m=m,
        n=n,
        k=k,
        t=t,
        q=q,
        seed=seed,
        design_channel=channel,
        constraints=matrix,
        row_roles=roles,
        row_terminus=np.array(termini, dtype=np.int64),
        prng_calls=rng.calls,
    )


def serialize(spec: CodeSpec) -> str:
    """Line-oriented text form of a code spec (see deserialize)."""
    lines = [SPEC_MAGIC]
    lines.append(
        f"m={spec.m} n={spec.n} k={spec.k} t={spec.t} q={spec.q} "
        f"seed={spec.seed} design_ebno_db={spec.design_channel.ebno_db:.6f}"
    )
    for r in range(spec.constraints.n_rows):
        cols = spec.constraints.row(r).indices()
        lines.append(f"row {spec.row_roles[r]} : " + " ".join(str(c) for c in cols))
    return "\n".join(lines) + "\n"


def deserialize(text: str) -> CodeSpec:
    """Parse and validate a serialized code spec.

    The file is authoritative: the PRNG is not re-run.  Termination and
    structural invariants are re-checked; violations raise SpecFormatError.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != SPEC_MAGIC:
        raise SpecFormatError(f"missing {SPEC_MAGIC!r} header")
    try:
        fields = dict(item.split("=", 1) for item in lines[1].split())
        m = int(fields["m"])
        n = int(fields["n"])
        k = int(fields["k"])
        t = int(fields["t"])
        q = int(fields["q"])
        seed = int(fields["seed"])
        ebno_db = float(fields["design_ebno_db"])
    except (KeyError, ValueError, IndexError) as exc:
        raise SpecFormatError(f"bad parameter line: {exc}") from exc
    full = 1 << m
    if not (0 < k < n <= full and (n - 1).bit_length() == m):
        raise SpecFormatError(f"inconsistent sizes m={m} n={n} k={k}")
    if not 0 <= seed <= _MASK64:
        raise SpecFormatError("seed out of 64-bit range")

    matrix = GF2Matrix(full - k, full)
    roles: list[str] = []
    termini: list[int] = []
    row_lines = lines[2:]
    if len(row_lines) != full - k:
        raise SpecFormatError(f"expected {full - k} rows, found {len(row_lines)}")
    for r, ln in enumerate(row_lines):
        parts = ln.split()
        if len(parts) < 4 or parts[0] != "row" or parts[2] != ":":
            raise SpecFormatError(f"malformed row line: {ln!r}")
        role = parts[1]
        if role not in _ROLES:
            raise SpecFormatError(f"unknown row role {role!r}")
        try:
            cols = [int(c) for c in parts[3:]]
        except ValueError as exc:
            raise SpecFormatError(f"bad column index in {ln!r}") from exc
        if any(not 0 <= c < full for c in cols):
            raise SpecFormatError(f"column out of range in {ln!r}")
        if any(b <= a for a, b in zip(cols, cols[1:])):
            raise SpecFormatError(f"columns must be strictly ascending in {ln!r}")
        terminus = cols[-1]
        if role == ROLE_SHORT:
            if len(cols) != 1 or terminus < n:
                raise SpecFormatError("shortening rows must be a single column >= n")
        else:
            if terminus >= n:
                raise SpecFormatError(f"{role} row may not end in the shortened range")
            if role == ROLE_STATIC and len(cols) != 1:
                raise SpecFormatError("static rows must have a single column")
        for c in cols:
            matrix.set(r, c)
        roles.append(role)
        termini.append(terminus)

    if roles.count(ROLE_SHORT) != full - n:
        raise SpecFormatError("wrong number of shortening rows")
    if sorted(tm for ro, tm in zip(roles, termini) if ro == ROLE_SHORT) != list(range(n, full)):
        raise SpecFormatError("shortening rows must cover positions n..2^m-1")
    if roles.count(ROLE_DFCA) != t or roles.count(ROLE_DFCB) != q:
        raise SpecFormatError("row role counts disagree with t/q header values")

    spec = CodeSpec(
        m=m,
        n=n,
        k=k,
        t=t,
        q=q,
        seed=seed,
        design_channel=ChannelModel(ebno_db=ebno_db, rate=k / n),
        constraints=matrix,
        row_roles=roles,
        row_terminus=np.array(termini, dtype=np.int64),
        prng_calls=None,
    )
    for r in range(matrix.n_rows):
        if last_set_position(matrix.row(r)) != termini[r]:
            raise SpecFormatError("row terminus does not match last set column")
    return spec
