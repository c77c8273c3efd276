"""Bound formulas from the empirical-entropy literature, evaluated against
measured compressed sizes."""

from __future__ import annotations

import csv
import heapq
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .compressors import bwt_pipeline_encode, lz77_encode, lz78_encode
from .compressors.container import CompressedBlob
from .core import Alphabet, Sequence
from .entropy import Distribution, hk, hk_bits, shannon_entropy
from .generators import de_bruijn

REFERENCE_MU = 0.01
MANZINI_LINEAR = 2 / 25


@dataclass
class BoundReport:
    """A formula bound, itemized, next to a measured size.

    ``formula_bits`` is the sum of ``terms``. For interval bounds
    (``lower_bits`` set) the upper end is exclusive.
    """

    name: str
    parameters: dict
    terms: dict
    measured_bits: float | None = None
    lower_bits: float | None = None
    notes: dict = field(default_factory=dict)

    @property
    def formula_bits(self) -> float:
        return math.fsum(self.terms.values())

    @property
    def slack(self) -> float | None:
        if self.measured_bits is None:
            return None
        return self.formula_bits - self.measured_bits

    @property
    def satisfied(self) -> bool | None:
        if self.measured_bits is None:
            return None
        if self.lower_bits is not None:
            return self.lower_bits - 1e-12 <= self.measured_bits < self.formula_bits
        return self.measured_bits <= self.formula_bits

    def to_dict(self) -> dict:
        out = {
            "bound": self.name,
            "parameters": dict(self.parameters),
            "terms": dict(self.terms),
            "formula_bits": self.formula_bits,
        }
        if self.lower_bits is not None:
            out["lower_bits"] = self.lower_bits
        out["measured_bits"] = self.measured_bits
        out["slack"] = self.slack
        out["satisfied"] = self.satisfied
        if self.notes:
            out["notes"] = dict(self.notes)
        return out


def zeta(lam: float, eps: float = 1e-12) -> float:
    """Riemann zeta at real lam > 1 with absolute error below ``eps``.

    Partial sum up to N plus the midpoint of a bracket on the tail. For
    the convex decreasing f(x) = x^-lam the tail sum over m > N lies in
    [int_{N+1}^inf f + f(N+1)/2, int_{N+1/2}^inf f]; N doubles until the
    bracket is narrower than 2 * eps.
    """
    if not lam > 1:
        raise ValueError(f"zeta series diverges for lambda={lam}; need lambda > 1")
    if not eps > 0:
        raise ValueError("eps must be positive")
    partial = []
    m = 0
    N = 16
    while True:
        partial.extend((m + i) ** -lam for i in range(1, N - m + 1))
        m = N
        lo = (N + 1) ** (1 - lam) / (lam - 1) + (N + 1) ** -lam / 2
        hi = (N + 0.5) ** (1 - lam) / (lam - 1)
        if hi - lo < 2 * eps:
            return math.fsum(partial) + (lo + hi) / 2
        if N > 1 << 30:
            raise ValueError(f"zeta({lam}) cannot reach eps={eps} within 2^30 terms")
        N *= 2


def manzini_bound(s: Sequence, k: int, mu: float, measured_bits: float | None = None) -> BoundReport:
    """8 H_k n + (mu + 2/25) n + sigma^k (2 sigma log2 sigma + 9) bits."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if mu < 0:
        raise ValueError("mu must be non-negative")
    n, sigma = s.n, s.sigma
    terms = {
        "entropy": 8 * hk_bits(s, k),
        "linear": (mu + MANZINI_LINEAR) * n,
        "alphabet": sigma**k * (2 * sigma * math.log2(sigma) + 9),
    }
    params = {"k": k, "mu": mu, "sigma": sigma, "n": n, "H_k": hk(s, k)}
    return BoundReport("manzini", params, terms, measured_bits)


def klv_bound(s: Sequence, k: int, lam: float, c: float = 1.0, measured_bits: float | None = None,
              eps: float = 1e-12) -> BoundReport:
    """lam H_k n + n log2 zeta(lam) + c sigma^(k+1) log2 sigma bits; ``c`` stands in for the O-constant."""
    if not lam > 1:
        raise ValueError(f"lambda must exceed 1, got {lam}")
    if c < 0:
        raise ValueError("c must be non-negative")
    n, sigma = s.n, s.sigma
    z = zeta(lam, eps)
    terms = {
        "entropy": lam * hk_bits(s, k),
        "zeta": n * math.log2(z),
        "table": c * sigma ** (k + 1) * math.log2(sigma),
    }
    params = {"k": k, "lambda": lam, "c": c, "sigma": sigma, "n": n, "H_k": hk(s, k)}
    return BoundReport("klv", params, terms, measured_bits, notes={"zeta": z, "zeta_bits_per_char": math.log2(z)})


def huffman_code_lengths(P) -> list[int]:
    """Codeword length per outcome; zero-probability outcomes get 0 (no codeword).

    Ties on weight merge the subtree holding the lowest symbol index first.
    A single possible outcome gets the empty codeword.
    """
    if not isinstance(P, Distribution):
        P = Distribution(tuple(P))
    heap = [(p, i, [i]) for i, p in enumerate(P.probabilities) if p > 0]
    heapq.heapify(heap)
    lengths = [0] * len(P)
    while len(heap) > 1:
        w1, i1, s1 = heapq.heappop(heap)
        w2, i2, s2 = heapq.heappop(heap)
        for sym in s1 + s2:
            lengths[sym] += 1
        heapq.heappush(heap, (w1 + w2, min(i1, i2), s1 + s2))
    return lengths


def expected_code_length(P, lengths) -> float:
    return math.fsum(float(p) * l for p, l in zip(P, lengths))


def noiseless_interval_check(P, expected_length: float | None = None) -> BoundReport:
    """Check H(P) <= expected length < H(P) + 1, by default for a Huffman code."""
    if not isinstance(P, Distribution):
        P = Distribution(tuple(P))
    H = shannon_entropy(P)
    if expected_length is None:
        expected_length = expected_code_length(P.probabilities, huffman_code_lengths(P))
    return BoundReport(
        "noiseless",
        {"sigma": len(P)},
        {"entropy": H, "one": 1.0},
        measured_bits=expected_length,
        lower_bits=H,
    )


def measured_mu(blob: CompressedBlob) -> float:
    """Coder overhead per coded symbol: (code bits - m H_0) / m over the coder's own input."""
    if blob.algorithm == "bwt":
        m, ideal = blob.stats["tokens"], blob.stats["token_entropy_bits"]
    elif blob.algorithm == "order0":
        m, ideal = blob.n, blob.stats["entropy_bits"]
    else:
        raise ValueError("mu is defined for the order-0 coder and the bwt pipeline")
    if m == 0:
        return 0.0
    return max(blob.sections["order0_code"] - ideal, 0.0) / m


def verify_manzini(s: Sequence, ks: Iterable[int], mu: float | None = None,
                   blob: CompressedBlob | None = None) -> list[BoundReport]:
    """Compress ``s`` with the bwt pipeline and compare its total size to the bound for each k.

    With ``mu=None`` the pipeline's own measured coder overhead is used.
    """
    if blob is None:
        blob = bwt_pipeline_encode(s)
    mu_meas = measured_mu(blob)
    mu_used = mu_meas if mu is None else mu
    reports = []
    for k in ks:
        report = manzini_bound(s, k, mu_used, measured_bits=blob.total_bits)
        report.notes.update({"mu_measured": mu_meas, "mu_reference": REFERENCE_MU, "stages": dict(blob.sections)})
        reports.append(report)
    return reports


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    H_k: float
    lz77_ratio: float
    lz78_ratio: float
    bwt_ratio: float


CONVERGENCE_FIELDS = ("n", "H_k", "lz77_ratio", "lz78_ratio", "bwt_ratio")


def _constant(n: int) -> Sequence:
    return Sequence(Alphabet.from_bytes("AB"), (0,) * n)


def _constant_plus_one(n: int) -> Sequence:
    return Sequence(Alphabet.from_bytes("AB"), (0,) * n + (1,))


FAMILIES: dict[str, Callable[[int], Sequence]] = {
    "constant": _constant,
    "constant-plus-one": _constant_plus_one,
    "de-bruijn": lambda order: de_bruijn(2, order),
}


def convergence_experiment(family: Callable[[int], Sequence] | str, sizes: Iterable[int],
                           k: int = 0) -> list[ConvergenceRow]:
    """H_k and compressed bits per symbol (payload only) for each member of a family.

    ``sizes`` are the family's parameters; the resulting lengths must
    strictly increase.
    """
    if isinstance(family, str):
        try:
            family = FAMILIES[family]
        except KeyError:
            raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}") from None
    rows = []
    last = -1
    for size in sizes:
        s = family(size)
        if s.n <= last:
            raise ValueError("family lengths must strictly increase")
        last = s.n
        rows.append(ConvergenceRow(
            s.n,
            hk(s, k),
            lz77_encode(s).payload_bits / s.n,
            lz78_encode(s).payload_bits / s.n,
            bwt_pipeline_encode(s).payload_bits / s.n,
        ))
    return rows


def convergence_csv(rows: list[ConvergenceRow], digits: int = 12) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CONVERGENCE_FIELDS)
    for r in rows:
        writer.writerow([r.n] + [f"{getattr(r, f):.{digits}g}" for f in CONVERGENCE_FIELDS[1:]])
    return buf.getvalue()
