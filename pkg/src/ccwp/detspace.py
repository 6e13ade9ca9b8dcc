"""Slater-determinant bitstring algebra.

A determinant is an int bitmask over spin orbitals: bit s-1 represents
spin orbital s (1-based), with the interleaved convention spin orbital
2p-1 = (spatial p, alpha) and 2p = (spatial p, beta).

Operator phases are those of normal-ordered second-quantized strings
a+_{to} ... a_{from} ... evaluated with spin-blocked orbital ordering
(all alpha ascending, then all beta ascending).  In this convention the
de-excitation operator is the exact matrix transpose of the excitation
operator and all excitation operators commute, phases included.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

__all__ = [
    "ExcitationIndex",
    "DeterminantSpace",
    "FULL",
    "reference_determinant",
    "apply_excitation",
    "apply_deexcitation",
    "apply_orbital_replacement",
    "enumerate_excitations",
    "build_space",
    "excitation_rank",
    "excitation_index_of",
]

FULL = "full"

_ALPHA_MASK = int("5" * 16, 16)  # bits 0,2,4,... i.e. odd spin orbitals


def _is_alpha(s):
    return s % 2 == 1


def _block_crossings(det, s):
    """Occupied orbitals strictly below spin orbital s in blocked order."""
    below = (1 << (s - 1)) - 1
    if _is_alpha(s):
        return bin(det & _ALPHA_MASK & below).count("1")
    return bin(det & _ALPHA_MASK).count("1") + bin(det & ~_ALPHA_MASK & below).count("1")


def _apply_string(det, creates, annihilates):
    """Evaluate a+_{c1}..a+_{cj} a_{lj}..a_{l1} (c, l ascending) on det."""
    phase = 1
    cur = det
    for s in annihilates:               # rightmost annihilator acts first
        bit = 1 << (s - 1)
        if not cur & bit:
            return None
        if _block_crossings(cur, s) % 2:
            phase = -phase
        cur ^= bit
    for s in reversed(creates):         # innermost creator acts first
        bit = 1 << (s - 1)
        if cur & bit:
            return None
        if _block_crossings(cur, s) % 2:
            phase = -phase
        cur |= bit
    return phase, cur


@dataclass(frozen=True, order=True)
class ExcitationIndex:
    """Holes (occupied in the reference) promoted to particles (virtuals)."""

    holes: tuple
    particles: tuple

    def __post_init__(self):
        if len(self.holes) != len(self.particles):
            raise ValueError("holes and particles must have equal length")
        if list(self.holes) != sorted(self.holes) or list(self.particles) != sorted(self.particles):
            raise ValueError("holes and particles must be sorted ascending")

    @property
    def rank(self):
        return len(self.holes)


def reference_determinant(nelec, n_spin):
    """Aufbau reference: the lowest nelec spin orbitals occupied."""
    if nelec > n_spin:
        raise ValueError(f"nelec={nelec} exceeds n_spin={n_spin}")
    return (1 << nelec) - 1


def apply_excitation(mu, det):
    """X_mu det -> None (annihilated) or (phase, det')."""
    return _apply_string(det, mu.particles, mu.holes)


def apply_deexcitation(mu, det):
    """Adjoint action: particles become holes and vice versa."""
    return _apply_string(det, mu.holes, mu.particles)


def apply_orbital_replacement(spec, det):
    """Generalised replacement: {"from": orbs, "to": orbs} on det.

    Identical from/to lists act as the (occupied-)number operator with
    phase +1; partially overlapping lists are rejected.
    """
    src = tuple(spec["from"])
    dst = tuple(spec["to"])
    if len(src) != len(dst):
        raise ValueError("from/to must have equal length")
    if set(src) & set(dst) and set(src) != set(dst):
        raise ValueError("from/to lists may not partially overlap")
    return _apply_string(det, dst, src)


def excitation_rank(det, ref):
    if bin(det).count("1") != bin(ref).count("1"):
        raise ValueError("determinants carry different electron counts")
    return bin(det ^ ref).count("1") // 2


def excitation_index_of(det, ref):
    """The canonical ExcitationIndex mapping ref to det."""
    holes = _orbitals(ref & ~det)
    particles = _orbitals(det & ~ref)
    return ExcitationIndex(holes=tuple(holes), particles=tuple(particles))


def _orbitals(mask):
    out = []
    s = 1
    while mask:
        if mask & 1:
            out.append(s)
        mask >>= 1
        s += 1
    return out


def _sz_of(orbs):
    # +1 per alpha, -1 per beta, in half-units of hbar
    return sum(1 if _is_alpha(s) else -1 for s in orbs)


def enumerate_excitations(nelec, n_spin, max_rank):
    """All Sz-conserving excitation indices of rank <= max_rank.

    Deterministic order: rank-major, then lexicographic holes, then
    particles.
    """
    if not 1 <= max_rank <= nelec:
        raise ValueError(f"max_rank must be in 1..{nelec}")
    occ = list(range(1, nelec + 1))
    virt = list(range(nelec + 1, n_spin + 1))
    out = []
    for rank in range(1, max_rank + 1):
        for holes in combinations(occ, rank):
            sz_h = _sz_of(holes)
            for particles in combinations(virt, rank):
                if _sz_of(particles) == sz_h:
                    out.append(ExcitationIndex(holes=holes, particles=particles))
    return out


@dataclass
class DeterminantSpace:
    """Ordered basis of an N-particle space over 2K spin orbitals.

    dets[0] is the reference; dets[i] is the image of excitations[i-1]
    applied to the reference, stored with its from-reference phase in
    ref_phases[i-1].
    """

    nelec: int
    n_spin: int
    max_rank: object            # int or FULL
    reference: int
    dets: np.ndarray            # uint64 masks, aligned with the basis
    excitations: list
    index_of: dict
    ref_phases: np.ndarray      # int8, aligned with excitations
    ranks: np.ndarray           # int8 rank per basis vector (0 for ref)
    _caches: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def size(self):
        return len(self.dets)

    @property
    def is_full(self):
        return self.max_rank == FULL or self.max_rank == min(
            self.nelec, self.n_spin - self.nelec)

    def index_of_det(self, det):
        return self.index_of[int(det)]

    def excitation_position(self, mu):
        """Position of mu in self.excitations (0-based)."""
        return self.index_of[int(self._det_of(mu))] - 1

    def _det_of(self, mu):
        res = apply_excitation(mu, self.reference)
        if res is None:
            raise KeyError(f"{mu} annihilates the reference")
        return res[1]


def build_space(nelec, n_spin, max_rank=FULL):
    """Construct the rank-truncated (or FULL) Sz-conserving space."""
    if max_rank == FULL:
        rank_cap = min(nelec, n_spin - nelec)
    else:
        rank_cap = int(max_rank)
    ref = reference_determinant(nelec, n_spin)
    excitations = enumerate_excitations(nelec, n_spin, rank_cap) if rank_cap else []
    dets = [ref]
    phases = []
    ranks = [0]
    for mu in excitations:
        phase, det = apply_excitation(mu, ref)
        dets.append(det)
        phases.append(phase)
        ranks.append(mu.rank)
    det_arr = np.array(dets, dtype=np.uint64)
    index_of = {int(d): i for i, d in enumerate(dets)}
    if len(index_of) != len(dets):
        raise RuntimeError("duplicate determinants generated")
    return DeterminantSpace(
        nelec=nelec, n_spin=n_spin, max_rank=max_rank, reference=ref,
        dets=det_arr, excitations=excitations, index_of=index_of,
        ref_phases=np.array(phases, dtype=np.int8),
        ranks=np.array(ranks, dtype=np.int8),
    )
