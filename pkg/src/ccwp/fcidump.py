"""FCIDUMP parsing/writing and symmetry-aware integral storage.

Integrals are kept in chemists' notation (pq|rs) over spatial orbitals,
exactly as they appear in the file.  The spin-orbital transform produces
antisymmetrized physicists'-notation integrals <pq||rs> with the
interleaved convention: spin orbital 2p-1 = (spatial p, alpha),
2p = (spatial p, beta), all indices 1-based.
"""

import re
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FcidumpError",
    "FcidumpHeader",
    "IntegralTable",
    "SpinIntegralTable",
    "canonical_eri_key",
    "parse_fcidump",
    "integral_lookup",
    "spin_orbital_transform",
    "write_fcidump",
]


class FcidumpError(ValueError):
    """Malformed FCIDUMP content or an illegal integral access."""


@dataclass(frozen=True)
class FcidumpHeader:
    norb: int
    nelec: int
    ms2: int = 0
    orbsym: tuple = ()
    isym: int = 1

    def __post_init__(self):
        if self.norb < 1:
            raise FcidumpError(f"NORB must be >= 1, got {self.norb}")
        if self.nelec < 1:
            raise FcidumpError(f"NELEC must be >= 1, got {self.nelec}")
        if self.nelec > 2 * self.norb:
            raise FcidumpError(
                f"NELEC={self.nelec} exceeds 2*NORB={2 * self.norb}")
        if self.ms2 != 0:
            raise FcidumpError(
                f"only closed-shell MS2=0 is supported, got MS2={self.ms2}")
        if not self.orbsym:
            object.__setattr__(self, "orbsym", tuple([1] * self.norb))
        elif len(self.orbsym) != self.norb:
            raise FcidumpError("ORBSYM length does not match NORB")


@dataclass
class IntegralTable:
    """One- and two-electron integrals over spatial orbitals (chemists')."""

    header: FcidumpHeader
    core_energy: float = 0.0
    h: np.ndarray = None          # (K, K) symmetric
    eri: np.ndarray = None        # (K, K, K, K), full 8-fold symmetric

    def __post_init__(self):
        k = self.header.norb
        if self.h is None:
            self.h = np.zeros((k, k))
        if self.eri is None:
            self.eri = np.zeros((k, k, k, k))
        if self.h.shape != (k, k) or self.eri.shape != (k, k, k, k):
            raise FcidumpError("integral array shape does not match NORB")

    @property
    def norb(self):
        return self.header.norb

    @property
    def nelec(self):
        return self.header.nelec

    def __eq__(self, other):
        if not isinstance(other, IntegralTable):
            return NotImplemented
        return (self.header == other.header
                and self.core_energy == other.core_energy
                and np.array_equal(self.h, other.h)
                and np.array_equal(self.eri, other.eri))


@dataclass
class SpinIntegralTable:
    """Antisymmetrized spin-orbital integrals <pq||rs>, indices 1..2K."""

    n_spin: int
    core_energy: float
    h_so: np.ndarray        # (2K, 2K)
    eri_anti: np.ndarray    # (2K, 2K, 2K, 2K)


def canonical_eri_key(p, q, r, s):
    """Representative of the 8-fold permutation class of (pq|rs)."""
    if p < q:
        p, q = q, p
    if r < s:
        r, s = s, r
    if (p, q) < (r, s):
        p, q, r, s = r, s, p, q
    return p, q, r, s


_NAMELIST_KV = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*=\s*([^=]*?)(?=(?:,?\s*[A-Za-z_][A-Za-z0-9_]*\s*=)|$)")


def _parse_namelist(text):
    start = text.find("&FCI")
    if start < 0:
        raise FcidumpError("missing &FCI namelist header")
    m = re.search(r"(&END|/)", text[start + 4:])
    if m is None:
        raise FcidumpError("namelist not terminated by &END or /")
    body = text[start + 4:start + 4 + m.start()]
    end = start + 4 + m.end()

    fields = {}
    for key, raw in _NAMELIST_KV.findall(body):
        values = [v for v in re.split(r"[,\s]+", raw.strip()) if v]
        if not values:
            raise FcidumpError(f"empty value for namelist key {key}")
        try:
            ints = [int(v) for v in values]
        except ValueError as exc:
            raise FcidumpError(f"non-integer namelist value for {key}: {raw!r}") from exc
        fields[key.upper()] = ints

    for req in ("NORB", "NELEC"):
        if req not in fields:
            raise FcidumpError(f"namelist is missing {req}")
    header = FcidumpHeader(
        norb=fields["NORB"][0],
        nelec=fields["NELEC"][0],
        ms2=fields.get("MS2", [0])[0],
        orbsym=tuple(fields.get("ORBSYM", ())),
        isym=fields.get("ISYM", [1])[0],
    )
    return header, end


_FLOAT_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eEdD][+-]?\d+)?$")


def parse_fcidump(text):
    """Parse FCIDUMP content (str or bytes) into an IntegralTable."""
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii")
    header, body_start = _parse_namelist(text)
    k = header.norb
    table = IntegralTable(header=header)
    seen_h = set()
    seen_eri = set()

    for lineno, line in enumerate(text[body_start:].splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise FcidumpError(f"record line {lineno}: expected 5 fields, got {len(parts)}")
        if not _FLOAT_RE.match(parts[0]):
            raise FcidumpError(f"record line {lineno}: bad value field {parts[0]!r}")
        value = float(parts[0].replace("D", "E").replace("d", "e"))
        try:
            p, q, r, s = (int(x) for x in parts[1:])
        except ValueError as exc:
            raise FcidumpError(f"record line {lineno}: non-integer index") from exc
        for idx in (p, q, r, s):
            if idx < 0 or idx > k:
                raise FcidumpError(f"record line {lineno}: index {idx} outside 0..{k}")

        if p == q == r == s == 0:
            table.core_energy = value
        elif r == s == 0 and p > 0 and q > 0:
            key = (max(p, q), min(p, q))
            if key in seen_h:
                warnings.warn(f"duplicate one-electron record {key}; last value wins")
            seen_h.add(key)
            table.h[p - 1, q - 1] = value
            table.h[q - 1, p - 1] = value
        elif min(p, q, r, s) > 0:
            key = canonical_eri_key(p, q, r, s)
            if key in seen_eri:
                warnings.warn(f"duplicate two-electron record {key}; last value wins")
            seen_eri.add(key)
            _set_eri(table.eri, p - 1, q - 1, r - 1, s - 1, value)
        else:
            raise FcidumpError(
                f"record line {lineno}: illegal index pattern ({p} {q} {r} {s})")
    return table


def _set_eri(eri, p, q, r, s, value):
    for a, b, c, d in ((p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                       (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p)):
        eri[a, b, c, d] = value


def integral_lookup(table, p, q, r, s):
    """Symmetry-expanded integral access; 0-indices select h/core blocks."""
    k = table.norb
    idx = (p, q, r, s)
    if any(i < 0 or i > k for i in idx):
        raise FcidumpError(f"index out of range 0..{k}: {idx}")
    if idx == (0, 0, 0, 0):
        return table.core_energy
    if r == 0 and s == 0 and p > 0 and q > 0:
        return table.h[p - 1, q - 1]
    if min(idx) > 0:
        return table.eri[p - 1, q - 1, r - 1, s - 1]
    raise FcidumpError(f"illegal index pattern {idx}")


def spin_orbital_transform(table):
    """Expand a spatial IntegralTable into antisymmetrized spin orbitals."""
    k = table.norb
    n_spin = 2 * k
    h_so = np.zeros((n_spin, n_spin))
    # interleaved spins: even 0-based positions are alpha, odd are beta
    h_so[0::2, 0::2] = table.h
    h_so[1::2, 1::2] = table.h

    # <pq||rs> = (pr|qs) d(sp,sr) d(sq,ss) - (ps|qr) d(sp,ss) d(sq,sr)
    coul = np.zeros((n_spin, n_spin, n_spin, n_spin))
    phys = table.eri.transpose(0, 2, 1, 3)  # (pr|qs) -> <pq|rs>
    for sp in (0, 1):
        for sq in (0, 1):
            coul[sp::2, sq::2, sp::2, sq::2] = phys
    eri_anti = coul - coul.transpose(0, 1, 3, 2)
    return SpinIntegralTable(n_spin=n_spin, core_energy=table.core_energy,
                             h_so=h_so, eri_anti=eri_anti)


def write_fcidump(table):
    """Canonical FCIDUMP text: sorted records, 16 significant digits."""
    hdr = table.header
    orbsym = hdr.orbsym if hdr.orbsym else tuple([1] * hdr.norb)
    lines = [
        f"&FCI NORB={hdr.norb},NELEC={hdr.nelec},MS2={hdr.ms2},",
        " ORBSYM=" + ",".join(str(x) for x in orbsym) + ",",
        f" ISYM={hdr.isym},",
        "&END",
    ]
    k = hdr.norb
    keys = set()
    nonzero = np.argwhere(table.eri != 0.0)
    for p, q, r, s in nonzero:
        keys.add(canonical_eri_key(p + 1, q + 1, r + 1, s + 1))
    for p, q, r, s in sorted(keys):
        lines.append(_record(table.eri[p - 1, q - 1, r - 1, s - 1], p, q, r, s))
    hkeys = set()
    for p, q in np.argwhere(table.h != 0.0):
        hkeys.add((max(p, q) + 1, min(p, q) + 1))
    for p, q in sorted(hkeys):
        lines.append(_record(table.h[p - 1, q - 1], p, q, 0, 0))
    lines.append(_record(table.core_energy, 0, 0, 0, 0))
    return "\n".join(lines) + "\n"


def _record(value, p, q, r, s):
    return f"{value:23.16E} {p:3d} {q:3d} {r:3d} {s:3d}"
