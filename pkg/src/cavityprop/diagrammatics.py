"""Diagrammatic construction of atom-photon propagators G^(N)_pq.

A process with N total excitations, final/initial atom occupation p/q,
N-p outgoing photons (momenta ``outputs``) and N-q incoming photons
(``inputs``) decomposes into linked diagrams, labeled by the time order of
the absorption and emission events, plus unlinked diagrams where some
photons pass through as spectators.

Each linked diagram is a product of vertex couplings, g(k') per absorbed
input and conjugate(g)(k) per emitted output, and one quasi-mode propagator
Phi^(N_i)_{p_i q_i}(omega - E_i) per segment between vertices, where E_i is
the total energy of the free continuum photons present in that segment.
Spectators contribute delta(k_out - k_in) factors; delta constraints are
kept symbolic so downstream integrals can collapse them analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterator, Sequence

import numpy as np

from .quasimode_propagators import ModelParams, coupling, phi, zeta

ABSORB = "absorb"
EMIT = "emit"


@dataclass(frozen=True)
class Event:
    """One vertex: absorption of an input photon or emission of an output."""

    kind: str  # ABSORB or EMIT
    momentum_index: int  # index into ProcessSpec.inputs or .outputs

    def __post_init__(self):
        if self.kind not in (ABSORB, EMIT):
            raise ValueError(f"event kind must be absorb or emit, got {self.kind!r}")
        if self.momentum_index < 0:
            raise ValueError("momentum_index must be nonnegative")

    def to_text(self) -> str:
        tag = "in" if self.kind == ABSORB else "out"
        return f"{self.kind} {tag}{self.momentum_index}"


@dataclass(frozen=True)
class ProcessSpec:
    """The propagator matrix element to compute: excitation number and momenta.

    outputs lists the N-p bra-side (emitted) momenta, inputs the N-q ket-side
    (absorbed) momenta.  Momenta may be complex for analytic-continuation
    checks; physical use is real.
    """

    n: int
    p: int
    q: int
    outputs: tuple = ()
    inputs: tuple = ()

    def __post_init__(self):
        if self.p not in (0, 1) or self.q not in (0, 1):
            raise ValueError(f"p and q must be 0 or 1, got p={self.p}, q={self.q}")
        if self.n < max(self.p, self.q):
            raise ValueError(f"n={self.n} below max(p,q)")
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if len(self.outputs) != self.n - self.p:
            raise ValueError(
                f"need {self.n - self.p} output momenta, got {len(self.outputs)}"
            )
        if len(self.inputs) != self.n - self.q:
            raise ValueError(
                f"need {self.n - self.q} input momenta, got {len(self.inputs)}"
            )
        for k in (*self.outputs, *self.inputs):
            if not np.isfinite(complex(k)):
                raise ValueError(f"momenta must be finite, got {k!r}")


@dataclass(frozen=True)
class SegmentData:
    """Bookkeeping for one segment between vertices.

    n_i is the atom-plus-quasi-mode excitation; p_i/q_i the atom occupation
    at the segment's later/earlier boundary; free_inputs the not-yet-absorbed
    input indices and free_outputs the already-emitted output indices, whose
    momenta sum to the energy shift E_i.
    """

    n_i: int
    p_i: int
    q_i: int
    free_inputs: tuple
    free_outputs: tuple

    def energy(self, inputs: Sequence, outputs: Sequence):
        """The segment energy shift E_i for the given momentum lists."""
        return sum(inputs[j] for j in self.free_inputs) + sum(
            outputs[j] for j in self.free_outputs
        )


def _build_segments(n: int, p: int, q: int, events) -> tuple:
    segs = []
    free_in = list(range(n - q))
    free_out: list = []
    cur_n = q
    cur_q = q
    for ev in events:
        p_i = 0 if ev.kind == ABSORB else 1
        segs.append(SegmentData(cur_n, p_i, cur_q, tuple(free_in), tuple(free_out)))
        if ev.kind == ABSORB:
            free_in.remove(ev.momentum_index)
            cur_n += 1
            cur_q = 1
        else:
            if cur_n < 1:
                raise ValueError("emission from an empty subsystem")
            free_out.append(ev.momentum_index)
            cur_n -= 1
            cur_q = 0
    segs.append(SegmentData(cur_n, p, cur_q, tuple(free_in), tuple(free_out)))
    return tuple(segs)


@dataclass(frozen=True)
class EventSequence:
    """A time-ordered (earliest first) interleaving of absorptions and emissions."""

    n: int
    p: int
    q: int
    events: tuple
    segments: tuple = ()

    def __post_init__(self):
        absorbs = sorted(e.momentum_index for e in self.events if e.kind == ABSORB)
        emits = sorted(e.momentum_index for e in self.events if e.kind == EMIT)
        if absorbs != list(range(self.n - self.q)):
            raise ValueError("every input index must be absorbed exactly once")
        if emits != list(range(self.n - self.p)):
            raise ValueError("every output index must be emitted exactly once")
        object.__setattr__(
            self, "segments", _build_segments(self.n, self.p, self.q, self.events)
        )

    def to_text(self) -> str:
        if not self.events:
            return "(no events)"
        return " ; ".join(e.to_text() for e in self.events)


def iter_sequences(n: int, p: int, q: int) -> Iterator[EventSequence]:
    """Lazily generate all valid event sequences in canonical order.

    Canonical order: at each step, absorptions in ascending input index come
    before emissions in ascending output index.  A sequence is valid iff no
    emission happens while the atom-plus-quasi-mode subsystem is empty.
    """
    if p not in (0, 1) or q not in (0, 1):
        raise ValueError(f"p and q must be 0 or 1, got p={p}, q={q}")
    if n < max(p, q):
        raise ValueError(f"n={n} below max(p,q)")
    n_in, n_out = n - q, n - p
    events: list = []
    absorbed = [False] * n_in
    emitted = [False] * n_out

    def rec(cur_n: int):
        if len(events) == n_in + n_out:
            yield EventSequence(n, p, q, tuple(events))
            return
        for j in range(n_in):
            if not absorbed[j]:
                absorbed[j] = True
                events.append(Event(ABSORB, j))
                yield from rec(cur_n + 1)
                events.pop()
                absorbed[j] = False
        if cur_n >= 1:
            for j in range(n_out):
                if not emitted[j]:
                    emitted[j] = True
                    events.append(Event(EMIT, j))
                    yield from rec(cur_n - 1)
                    events.pop()
                    emitted[j] = False

    yield from rec(q)


def enumerate_sequences(n: int, p: int, q: int) -> list:
    """All valid event sequences for (n, p, q), deterministically ordered."""
    return list(iter_sequences(n, p, q))


def count_sequences(n: int, p: int, q: int) -> int:
    """Number of valid sequences, via lattice-path counting.

    Valid letter patterns (which steps absorb vs emit) are counted by a DP
    over (#absorbed, #emitted) with the occupancy constraint, then multiplied
    by the free (N-q)! (N-p)! assignments of distinct momentum indices.
    Equals len(enumerate_sequences(n, p, q)) without materializing them.
    """
    if p not in (0, 1) or q not in (0, 1):
        raise ValueError(f"p and q must be 0 or 1, got p={p}, q={q}")
    if n < max(p, q):
        raise ValueError(f"n={n} below max(p,q)")
    n_in, n_out = n - q, n - p
    ways = [[0] * (n_out + 1) for _ in range(n_in + 1)]
    ways[0][0] = 1
    for a in range(n_in + 1):
        for e in range(n_out + 1):
            w = ways[a][e]
            if not w:
                continue
            if a < n_in:
                ways[a + 1][e] += w
            if e < n_out and q + a - e >= 1:
                ways[a][e + 1] += w
    return ways[n_in][n_out] * math.factorial(n_in) * math.factorial(n_out)


def coupling_out(k, params: ModelParams):
    """Emission vertex factor: the analytic continuation of conj(g(k)).

    Equals conj(coupling(k)) for real k; defined as conj(g(conj(k))) so the
    amplitude stays analytic in the momenta.
    """
    return np.conj(coupling(np.conj(k), params))


def _vertex_prefactor(spec: ProcessSpec, params: ModelParams):
    value = 1.0 + 0.0j
    for k in spec.inputs:
        value *= coupling(k, params)
    for k in spec.outputs:
        value *= coupling_out(k, params)
    return value


def linked_amplitude(seq: EventSequence, spec: ProcessSpec, omega, params: ModelParams):
    """The single-diagram amplitude: vertex couplings times segment propagators."""
    if (seq.n, seq.p, seq.q) != (spec.n, spec.p, spec.q):
        raise ValueError("sequence and spec describe different processes")
    value = _vertex_prefactor(spec, params)
    for seg in seq.segments:
        shift = seg.energy(spec.inputs, spec.outputs)
        value *= phi(seg.n_i, seg.p_i, seg.q_i, omega - shift, params)
    return value


def linked_sum(spec: ProcessSpec, omega, params: ModelParams, sequences=None):
    """Lambda^(N)_pq: the sum of all linked diagrams (all valid sequences)."""
    if sequences is None:
        sequences = iter_sequences(spec.n, spec.p, spec.q)
    return sum(
        (linked_amplitude(seq, spec, omega, params) for seq in sequences),
        start=0.0 + 0.0j,
    )


@dataclass(frozen=True)
class Term:
    """One distribution-valued contribution: delta constraints times a smooth factor.

    delta_pairs lists (output_index, input_index) identifications, meaning a
    product of delta(k_out - k_in) factors; smooth is the delta-free complex
    value at the spec's momenta.
    """

    delta_pairs: tuple
    smooth: complex


@dataclass(frozen=True)
class PropagatorValue:
    """A propagator evaluated at fixed momenta, as a list of delta-tagged terms."""

    terms: tuple

    def term(self, delta_pairs) -> complex:
        """The smooth factor attached to the given delta structure (0 if absent)."""
        key = tuple(sorted(tuple(p) for p in delta_pairs))
        for t in self.terms:
            if t.delta_pairs == key:
                return t.smooth
        return 0.0 + 0.0j

    @property
    def smooth_part(self) -> complex:
        """The fully linked, delta-free term."""
        return self.term(())


def _merge_terms(raw: list) -> tuple:
    acc: dict = {}
    for t in raw:
        key = tuple(sorted(tuple(p) for p in t.delta_pairs))
        acc[key] = acc.get(key, 0.0 + 0.0j) + t.smooth
    return tuple(Term(k, v) for k, v in sorted(acc.items(), key=lambda kv: (len(kv[0]), kv[0])))


def full_propagator(spec: ProcessSpec, omega, params: ModelParams) -> PropagatorValue:
    """G^(N)_pq as a sum over spectator matchings of shifted linked sums.

    For j = 0..min(N-p, N-q) spectator photons, every injective matching of
    j outputs to j inputs contributes delta factors and a linked propagator
    Lambda^(N-j) of the remaining photons with omega shifted by the spectator
    energies.  Each unordered matching is counted exactly once with unit
    weight; this normalization reproduces the explicit N=1 and N=2 closed
    forms and the discretized-Hamiltonian oracle.
    """
    n_out, n_in = len(spec.outputs), len(spec.inputs)
    m_max = min(n_out, n_in)
    raw = []
    for j in range(m_max + 1):
        for out_sel in combinations(range(n_out), j):
            for in_sel in permutations(range(n_in), j):
                pairs = tuple(sorted(zip(out_sel, in_sel)))
                shift = sum(spec.outputs[o] for o in out_sel)
                rem_out = tuple(
                    k for i, k in enumerate(spec.outputs) if i not in out_sel
                )
                rem_in = tuple(k for i, k in enumerate(spec.inputs) if i not in in_sel)
                sub = ProcessSpec(spec.n - j, spec.p, spec.q, rem_out, rem_in)
                raw.append(Term(pairs, linked_sum(sub, omega - shift, params)))
    return PropagatorValue(_merge_terms(raw))


def _remap(pv: PropagatorValue, factor, out_map, in_map) -> list:
    """Scale a propagator's terms and renumber their delta indices."""
    return [
        Term(
            tuple((out_map[o], in_map[i]) for o, i in t.delta_pairs),
            factor * t.smooth,
        )
        for t in pv.terms
    ]


def closed_form_g1(p: int, q: int, omega, momenta, params: ModelParams) -> PropagatorValue:
    """Hand-coded single-excitation propagators for cross-checks.

    momenta is the pair (outputs, inputs).  The atom-scattering form G_00
    uses the vertex-rule conjugation, conj(g)(k) g(k'); placing the
    conjugate on the other factor would break the conjugation relation
    between G_01 and G_10, so the diagram rules fix this choice.
    """
    outputs, inputs = (tuple(momenta[0]), tuple(momenta[1]))
    spec = ProcessSpec(1, p, q, outputs, inputs)  # reuse length validation
    # resummed self-energy form of the excited-state propagator; independent
    # of the pole-factored phi that the generic assembly is built on
    g11 = 1.0 / (omega - params.omega_a - zeta(omega, params))
    if (p, q) == (1, 1):
        return PropagatorValue((Term((), g11),))
    if (p, q) == (0, 1):
        k = outputs[0]
        return PropagatorValue((Term((), coupling_out(k, params) / (omega - k) * g11),))
    if (p, q) == (1, 0):
        kp = inputs[0]
        return PropagatorValue((Term((), coupling(kp, params) / (omega - kp) * g11),))
    k, kp = outputs[0], inputs[0]
    smooth = (
        coupling_out(k, params)
        * coupling(kp, params)
        / ((omega - k) * (omega - kp))
        * g11
    )
    return PropagatorValue(
        _merge_terms(
            [Term(((0, 0),), 1.0 / (omega - kp)), Term((), smooth)]
        )
    )


def closed_form_g2(p: int, q: int, omega, momenta, params: ModelParams) -> PropagatorValue:
    """Hand-coded two-excitation propagators for cross-checks.

    G_11 is the explicit two-term closed form; G_01, G_10, G_00 are built
    from it by one-vertex recursions, with delta bookkeeping distributed
    over the composed terms.
    """
    outputs, inputs = (tuple(momenta[0]), tuple(momenta[1]))
    ProcessSpec(2, p, q, outputs, inputs)
    if (p, q) == (1, 1):
        k1, kp1 = outputs[0], inputs[0]
        if params.lam > 0:
            cavity = zeta(omega - k1, params) * zeta(omega - kp1, params) / params.lam
        else:
            cavity = 0.0
        smooth = (
            coupling(kp1, params)
            * coupling_out(k1, params)
            * phi(1, 1, 1, omega - k1, params)
            * phi(1, 1, 1, omega - kp1, params)
            * (1.0 / (omega - k1 - kp1) + cavity * phi(2, 1, 1, omega, params))
        )
        return PropagatorValue(
            _merge_terms(
                [
                    Term(((0, 0),), phi(1, 1, 1, omega - k1, params)),
                    Term((), smooth),
                ]
            )
        )
    if (p, q) == (0, 1):
        k1, k2 = outputs
        kp1 = inputs[0]
        pre = 1.0 / (omega - k1 - k2)
        a = closed_form_g2(1, 1, omega, ((k2,), (kp1,)), params)
        b = closed_form_g2(1, 1, omega, ((k1,), (kp1,)), params)
        raw = _remap(a, pre * coupling_out(k1, params), {0: 1}, {0: 0})
        raw += _remap(b, pre * coupling_out(k2, params), {0: 0}, {0: 0})
        return PropagatorValue(_merge_terms(raw))
    if (p, q) == (1, 0):
        k1 = outputs[0]
        kp1, kp2 = inputs
        pre = 1.0 / (omega - kp1 - kp2)
        a = closed_form_g2(1, 1, omega, ((k1,), (kp2,)), params)
        b = closed_form_g2(1, 1, omega, ((k1,), (kp1,)), params)
        raw = _remap(a, pre * coupling(kp1, params), {0: 0}, {0: 1})
        raw += _remap(b, pre * coupling(kp2, params), {0: 0}, {0: 0})
        return PropagatorValue(_merge_terms(raw))
    # p = q = 0
    k1, k2 = outputs
    kp1, kp2 = inputs
    pre = 1.0 / (omega - kp1 - kp2)
    raw = [Term(((0, 0), (1, 1)), pre), Term(((0, 1), (1, 0)), pre)]
    a = closed_form_g2(0, 1, omega, ((k1, k2), (kp2,)), params)
    b = closed_form_g2(0, 1, omega, ((k1, k2), (kp1,)), params)
    raw += _remap(a, pre * coupling(kp1, params), {0: 0, 1: 1}, {0: 1})
    raw += _remap(b, pre * coupling(kp2, params), {0: 0, 1: 1}, {0: 0})
    return PropagatorValue(_merge_terms(raw))
