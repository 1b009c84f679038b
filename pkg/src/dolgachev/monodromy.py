"""SL2(Z) arithmetic, principal congruence subgroups, and elliptic-fibration bookkeeping."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from dolgachev.ratmat import DomainError


@dataclass(frozen=True)
class SL2:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise DomainError(f"determinant of [[{self.a},{self.b}],[{self.c},{self.d}]] "
                              f"is {self.a * self.d - self.b * self.c}, not 1")

    @classmethod
    def identity(cls) -> SL2:
        return cls(1, 0, 0, 1)

    @classmethod
    def parse(cls, text: str) -> SL2:
        """Read ``"a,b,c,d"`` (row-major)."""
        parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
        if len(parts) != 4:
            raise ValueError(f"expected four comma-separated integers, got {text!r}")
        try:
            return cls(*(int(p) for p in parts))
        except ValueError:
            raise ValueError(f"expected four comma-separated integers, got {text!r}") from None

    def __matmul__(self, o: SL2) -> SL2:
        return SL2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                   self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def inverse(self) -> SL2:
        return SL2(self.d, -self.b, -self.c, self.a)

    def __pow__(self, n: int) -> SL2:
        base = self if n >= 0 else self.inverse()
        out = SL2.identity()
        for _ in range(abs(n)):
            out = out @ base
        return out

    def conjugate(self, g: SL2) -> SL2:
        """g self g^-1."""
        return g @ self @ g.inverse()

    def as_rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    def __str__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


def mul(*gs: SL2) -> SL2:
    out = SL2.identity()
    for g in gs:
        out = out @ g
    return out


def inverse(g: SL2) -> SL2:
    return g.inverse()


def power(g: SL2, n: int) -> SL2:
    return g ** n


T = SL2(1, 1, 0, 1)
S = SL2(0, -1, 1, 0)


def local_monodromy(kodaira_type: str) -> SL2:
    """Standard representative for I_k: [[1,k],[0,1]]; a smooth fiber gives the identity."""
    k = fiber_euler_number(kodaira_type)
    return SL2(1, k, 0, 1)


def in_gamma(n: int, g: SL2) -> bool:
    if n < 2:
        raise ValueError("level must be >= 2")
    return g.a % n == 1 % n and g.d % n == 1 % n and g.b % n == 0 and g.c % n == 0


def _prime_divisors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def gamma_index(n: int) -> int:
    """Index of the level-n principal congruence subgroup, i.e. the order of SL2(Z/n)."""
    if n < 2:
        raise ValueError("level must be >= 2")
    idx = Fraction(n ** 3)
    for p in _prime_divisors(n):
        idx *= 1 - Fraction(1, p * p)
    assert idx.denominator == 1
    return int(idx)


def count_sl2_mod(n: int) -> int:
    """Brute-force count of 2x2 matrices over Z/n with determinant 1."""
    return sum(1 for a, b, c, d in itertools.product(range(n), repeat=4) if (a * d - b * c) % n == 1 % n)


def relation_check(gs: Sequence[SL2]) -> bool:
    if not gs:
        raise ValueError("empty product")
    return mul(*gs) == SL2.identity()


def words(generators: Sequence[SL2], max_length: int) -> Iterable[SL2]:
    """Distinct products of up to max_length generators and their inverses, shortest first."""
    letters = list(generators) + [g.inverse() for g in generators]
    seen = {SL2.identity()}
    frontier = [SL2.identity()]
    yield SL2.identity()
    for _ in range(max_length):
        nxt = []
        for w in frontier:
            for g in letters:
                x = w @ g
                if x not in seen:
                    seen.add(x)
                    nxt.append(x)
                    yield x
        frontier = nxt


def find_conjugate_relation(k: int, count: int, max_length: int = 3) -> list[SL2] | None:
    """Conjugates g_i of [[1,k],[0,1]] with g_1 ... g_count = 1, conjugators up to max_length.

    The first factor is kept unconjugated; the last is forced by the others.
    """
    base = SL2(1, k, 0, 1)
    conj = [base.conjugate(w) for w in words((T, S), max_length)]
    pool = list(dict.fromkeys(conj))
    pool_set = set(pool)
    for middle in itertools.product(pool, repeat=count - 2):
        head = mul(base, *middle)
        last = head.inverse()
        if last in pool_set:
            return [base, *middle, last]
    return None


_IK = re.compile(r"^I_?(\d+)$")


def fiber_euler_number(kodaira_type: str) -> int:
    t = kodaira_type.strip()
    if t.lower() == "smooth":
        return 0
    mt = _IK.match(t)
    if mt is None:
        raise DomainError(f"unsupported fiber type {kodaira_type!r}")
    return int(mt.group(1))


@dataclass(frozen=True)
class FiberConfig:
    fibers: tuple[tuple[str, int], ...]

    def __post_init__(self):
        for t, mult in self.fibers:
            fiber_euler_number(t)
            if mult < 1:
                raise DomainError(f"multiplicity {mult} < 1")

    @classmethod
    def of(cls, types: Iterable[str]) -> FiberConfig:
        return cls(tuple((t, 1) for t in types))

    @classmethod
    def parse(cls, text: str) -> FiberConfig:
        """Comma-separated types; ``I3x4`` repeats, ``smooth*2`` marks multiplicity."""
        out = []
        for tok in (s.strip() for s in text.split(",")):
            if not tok:
                continue
            mult = 1
            if "*" in tok:
                tok, m = tok.split("*", 1)
                mult = int(m)
            reps = 1
            if "x" in tok:
                tok, r = tok.split("x", 1)
                reps = int(r)
            out.extend([(tok, mult)] * reps)
        return cls(tuple(out))


def euler_check(cfg: FiberConfig | Iterable[str], expected_c2: int) -> bool:
    if not isinstance(cfg, FiberConfig):
        cfg = FiberConfig.of(cfg)
    return sum(fiber_euler_number(t) for t, _ in cfg.fibers) == expected_c2


def canonical_formula(chi_structure_sheaf: int, multiplicities: Sequence[int]) -> Fraction:
    """Fiber coefficient of K for an elliptic fibration over the line: (chi - 2) + sum (m-1)/m."""
    for m in multiplicities:
        if m < 2:
            raise DomainError(f"multiple-fiber multiplicity {m} < 2")
    return chi_structure_sheaf - 2 + sum((Fraction(m - 1, m) for m in multiplicities), Fraction(0))
