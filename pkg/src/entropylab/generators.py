"""Sequences with known structure: de Bruijn strings, normal-number digit
streams and order-k Markov samples."""

from __future__ import annotations

import json
import random
from bisect import bisect_right
from collections import Counter
from dataclasses import asdict, dataclass, field
from itertools import accumulate
from typing import Iterator

import numpy as np

from .core import Alphabet, CapacityError, Sequence, check_cap
from .entropy import MarkovModel, _as_context

MAX_PRIMES = 10_000_000
KINDS = ("de-bruijn", "champernowne", "copeland-erdos", "markov-sample")


def lyndon_words(sigma: int, k: int) -> Iterator[tuple[int, ...]]:
    """Lyndon words of length at most k over range(sigma), in lexicographic order (Duval)."""
    w = [-1]
    while w:
        w[-1] += 1
        yield tuple(w)
        m = len(w)
        while len(w) < k:
            w.append(w[-m])
        while w and w[-1] == sigma - 1:
            w.pop()


def de_bruijn(sigma: int, k: int) -> Sequence:
    """Linear de Bruijn sequence: every k-tuple over ``sigma`` symbols appears once as a window.

    The cyclic sequence is the concatenation of the Lyndon words whose length
    divides k; its first k-1 symbols are appended so the windows don't wrap.
    """
    if sigma < 2:
        raise ValueError("sigma must be at least 2")
    if k < 1:
        raise ValueError("k must be at least 1")
    check_cap(sigma**k + k - 1, 8, f"de Bruijn sequence sigma={sigma} k={k}")
    cyc = []
    for w in lyndon_words(sigma, k):
        if k % len(w) == 0:
            cyc.extend(w)
    cyc.extend(cyc[: k - 1])
    return Sequence(Alphabet.digits(sigma), tuple(cyc))


def _digits(value: int, base: int) -> list[int]:
    out = []
    while value:
        value, d = divmod(value, base)
        out.append(d)
    out.reverse()
    return out


def _expansion(numbers: Iterator[int], base: int, n: int) -> Sequence:
    if base < 2:
        raise ValueError("base must be at least 2")
    if n < 1:
        raise ValueError("n must be at least 1")
    check_cap(n, 8, f"{n}-digit expansion")
    out: list[int] = []
    for value in numbers:
        out.extend(_digits(value, base))
        if len(out) >= n:
            break
    return Sequence(Alphabet.digits(base), tuple(out[:n]))


def champernowne_digits(base: int, n: int) -> Sequence:
    """First n digits after the point of 0.1 2 3 4 ... written in ``base``."""
    def naturals():
        i = 1
        while True:
            yield i
            i += 1
    return _expansion(naturals(), base, n)


def primes(limit_count: int = MAX_PRIMES, segment: int = 1 << 18) -> Iterator[int]:
    """Primes in increasing order from a segmented sieve of Eratosthenes."""
    base = [2, 3, 5, 7, 11, 13]
    produced = 0
    for p in base:
        yield p
        produced += 1
        if produced >= limit_count:
            return
    lo = 14
    while True:
        hi = lo + segment
        root = int(hi**0.5) + 1
        if base[-1] < root:
            base = _small_primes(root * 2)
        mark = np.ones(hi - lo, dtype=bool)
        for p in base:
            if p * p >= hi:
                break
            start = max(p * p, (lo + p - 1) // p * p)
            mark[start - lo :: p] = False
        for offset in np.flatnonzero(mark).tolist():
            yield lo + offset
            produced += 1
            if produced >= limit_count:
                return
        lo = hi


def _small_primes(limit: int) -> list[int]:
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).tolist()


def copeland_erdos_digits(base: int, n: int) -> Sequence:
    """First n digits after the point of 0.2 3 5 7 11 13 ... written in ``base``."""
    def capped():
        count = 0
        for p in primes():
            count += 1
            yield p
        if count >= MAX_PRIMES:
            raise CapacityError(f"expansion needs more than the first {MAX_PRIMES} primes")
    return _expansion(capped(), base, n)


@dataclass(frozen=True)
class MarkovSample:
    sequence: Sequence
    seed: int
    start: tuple
    restarts: list = field(default_factory=list)  # (position, new context) pairs


def markov_sample(m: MarkovModel, n: int, seed: int, start=None) -> MarkovSample:
    """Random walk of length n through model ``m``.

    Randomness comes from :class:`random.Random` (MT19937) seeded with
    ``seed``. Each step draws ``r = rng.randrange(|s_w|)`` and emits the
    first follower, in alphabet order, whose cumulative count exceeds r.
    Without ``start`` the walk begins at ``rng.randrange`` over the sorted
    occurring contexts; the start context is emitted as the first k symbols.
    On reaching a context with no followers the walk jumps to a random
    occurring context without emitting it, and the jump is recorded.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if m.probabilities is not None:
        raise ValueError("sampling needs a count-based model")
    k = m.order
    table = {w: f for w, f in m.table.entries.items() if f}
    if not table:
        raise ValueError("model has no context with followers")
    contexts = sorted(table)
    cumulative = {}
    for w, followers in table.items():
        syms = sorted(followers)
        cumulative[w] = (syms, list(accumulate(followers[c] for c in syms)))

    rng = random.Random(seed)
    if start is None:
        ctx = contexts[rng.randrange(len(contexts))]
    else:
        ctx = _as_context(m.alphabet, start)
        if len(ctx) != k:
            raise ValueError(f"start context must have length {k}")
        if any(not 0 <= c < m.sigma for c in ctx):
            raise ValueError("start context uses symbols outside the alphabet")
    first = ctx
    out = list(ctx[:n])
    restarts = []
    while len(out) < n:
        if ctx not in cumulative:
            ctx = contexts[rng.randrange(len(contexts))]
            restarts.append((len(out), ctx))
        syms, cum = cumulative[ctx]
        c = syms[bisect_right(cum, rng.randrange(cum[-1]))]
        out.append(c)
        if k:
            ctx = ctx[1:] + (c,)
    return MarkovSample(Sequence(m.alphabet, tuple(out)), seed, first, restarts)


def normality_deviation(s: Sequence, k: int, base: int | None = None) -> float:
    """Largest |window frequency - base^-k| over all base^k tuples, from the n-k+1 sliding windows."""
    b = s.sigma if base is None else base
    if k < 1 or s.n < k:
        raise ValueError("need n >= k >= 1")
    if b < s.sigma and s.n and max(s.data) >= b:
        raise ValueError(f"sequence uses symbols beyond base {b}")
    cells = b**k
    check_cap(cells, 8, f"{b}^{k} tuple table")
    windows = s.n - k + 1
    if cells < 2**62:
        arr = s.array
        codes = np.zeros(windows, dtype=np.int64)
        for j in range(k):
            codes *= b
            codes += arr[j:j + windows]
        counts = np.unique(codes, return_counts=True)[1].tolist()
    else:
        counts = list(Counter(s.data[i:i + k] for i in range(windows)).values())
    target = 1.0 / cells
    dev = max(abs(c / windows - target) for c in counts)
    if len(counts) < cells:
        dev = max(dev, target)
    return dev


@dataclass
class GeneratorSpec:
    """Parameters for one generator run; serializes to a small JSON config."""

    kind: str
    n: int | None = None
    base: int | None = None
    sigma: int | None = None
    k: int | None = None
    seed: int | None = None
    corpus: str | None = None
    start: str | None = None

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.kind == "de-bruijn":
            if self.sigma is None or self.sigma < 2:
                raise ValueError("de-bruijn needs sigma >= 2")
            if self.k is None or self.k < 1:
                raise ValueError("de-bruijn needs k >= 1")
        elif self.kind in ("champernowne", "copeland-erdos"):
            if self.base is None or self.base < 2:
                raise ValueError(f"{self.kind} needs base >= 2")
            if self.n is None or self.n < 1:
                raise ValueError(f"{self.kind} needs n >= 1")
        else:
            if self.corpus is None:
                raise ValueError("markov-sample needs a corpus file")
            if self.k is None or self.k < 0:
                raise ValueError("markov-sample needs k >= 0")
            if self.n is None or self.n < 1:
                raise ValueError("markov-sample needs n >= 1")
            if self.seed is None:
                raise ValueError("markov-sample needs a seed")

    def to_json(self) -> str:
        return json.dumps({k: v for k, v in asdict(self).items() if v is not None}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> GeneratorSpec:
        raw = json.loads(text)
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown generator config keys: {', '.join(sorted(unknown))}")
        spec = cls(**raw)
        spec.validate()
        return spec


def generate(spec: GeneratorSpec, corpus: Sequence | None = None):
    """Run a generator; returns the sequence and a metadata dict for the sidecar."""
    spec.validate()
    meta = {"spec": {k: v for k, v in asdict(spec).items() if v is not None}}
    if spec.kind == "de-bruijn":
        seq = de_bruijn(spec.sigma, spec.k)
    elif spec.kind == "champernowne":
        seq = champernowne_digits(spec.base, spec.n)
    elif spec.kind == "copeland-erdos":
        seq = copeland_erdos_digits(spec.base, spec.n)
    else:
        from .entropy import fit_markov

        if corpus is None:
            raise ValueError("markov-sample needs the corpus sequence")
        model = fit_markov(corpus, spec.k)
        sample = markov_sample(model, spec.n, spec.seed, spec.start)
        seq = sample.sequence
        meta["start"] = list(sample.start)
        meta["restarts"] = [[pos, list(ctx)] for pos, ctx in sample.restarts]
    meta["n"] = seq.n
    meta["sigma"] = seq.sigma
    return seq, meta
