"""Exact rational sequences with symbolic eventually-periodic tails.

A sequence is a finite rational prefix followed by a symbolic tail
(zero, constant, or periodic).  This class is closed under all the
operators used elsewhere in the package, and it makes lattice
operations, norms, space membership and limit values exactly
decidable.  Coordinates are 1-indexed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

#: Distinguished non-finite norm value.  Only ever compared, never used
#: in arithmetic; comparisons between Fraction and math.inf are exact.
INFINITE = math.inf


class SchemaError(ValueError):
    """Raised when a serialized document violates the expected schema."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def rat(value) -> Fraction:
    """Coerce an int, a 'p/q' or integer string, or a Fraction to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


def format_rational(value: Fraction) -> str:
    return str(value)


def _rats(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(rat(v) for v in values)


class NormKind(Enum):
    SUP = "sup"
    L1 = "l1"
    SUP_LIMSUP = "sup-limsup"

    @classmethod
    def parse(cls, text: str, path: str = "norm") -> "NormKind":
        for kind in cls:
            if kind.value == text:
                return kind
        raise SchemaError(path, f"unknown norm kind {text!r}")


@dataclass(frozen=True)
class SpaceKind:
    """A concrete coordinate or sequence space.

    kind is one of "all", "c", "c0", "l1", "linf", "finite"; dim is set
    only for kind == "finite".
    """

    kind: str
    dim: int | None = None

    def __post_init__(self):
        if self.kind == "finite":
            if not isinstance(self.dim, int) or self.dim < 1:
                raise ValueError("finite-dimensional space needs a positive dim")
        elif self.kind not in ("all", "c", "c0", "l1", "linf"):
            raise ValueError(f"unknown space kind {self.kind!r}")
        elif self.dim is not None:
            raise ValueError(f"space {self.kind!r} takes no dimension")

    @property
    def is_finite_dim(self) -> bool:
        return self.kind == "finite"

    def __str__(self):
        return f"finite:{self.dim}" if self.is_finite_dim else self.kind

    @classmethod
    def parse(cls, text: str, path: str = "space") -> "SpaceKind":
        if text.startswith("finite:"):
            try:
                return cls("finite", int(text.split(":", 1)[1]))
            except ValueError:
                raise SchemaError(path, f"bad finite dimension in {text!r}") from None
        try:
            return cls(text)
        except ValueError:
            raise SchemaError(path, f"unknown space {text!r}") from None


SEQ_ALL = SpaceKind("all")
SPACE_C = SpaceKind("c")
SPACE_C0 = SpaceKind("c0")
SPACE_L1 = SpaceKind("l1")
SPACE_LINF = SpaceKind("linf")


def finite_dim(d: int) -> SpaceKind:
    return SpaceKind("finite", d)


def _minimal_period(block: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    n = len(block)
    for p in range(1, n + 1):
        if n % p == 0 and all(block[i] == block[i % p] for i in range(n)):
            return block[:p]
    return block


@dataclass(frozen=True)
class Tail:
    """Symbolic tail: zero, constant, or periodic with a nonempty block.

    Construction canonicalizes: a periodic block is reduced to its
    minimal period, an all-equal block collapses to a constant, and the
    zero constant collapses to the zero tail.
    """

    kind: str  # "zero" | "const" | "periodic"
    value: Fraction | None = None
    block: tuple[Fraction, ...] = ()

    def __post_init__(self):
        if self.kind == "zero":
            object.__setattr__(self, "value", None)
            object.__setattr__(self, "block", ())
            return
        if self.kind == "const":
            v = rat(self.value)
            if v == 0:
                object.__setattr__(self, "kind", "zero")
                object.__setattr__(self, "value", None)
            else:
                object.__setattr__(self, "value", v)
            object.__setattr__(self, "block", ())
            return
        if self.kind != "periodic":
            raise ValueError(f"unknown tail kind {self.kind!r}")
        block = _minimal_period(_rats(self.block))
        if not block:
            raise ValueError("periodic tail needs a nonempty block")
        if len(block) == 1:
            v = block[0]
            object.__setattr__(self, "kind", "zero" if v == 0 else "const")
            object.__setattr__(self, "value", None if v == 0 else v)
            object.__setattr__(self, "block", ())
        else:
            object.__setattr__(self, "value", None)
            object.__setattr__(self, "block", block)

    @property
    def period(self) -> int:
        return len(self.block) if self.kind == "periodic" else 1

    def entry(self, offset: int) -> Fraction:
        """Value at the given 0-based offset from the tail start."""
        if self.kind == "zero":
            return Fraction(0)
        if self.kind == "const":
            return self.value
        return self.block[offset % len(self.block)]

    def last_entry(self) -> Fraction:
        """The value the tail would have one slot before its start."""
        return self.entry(-1)

    def rotated_right(self) -> "Tail":
        if self.kind != "periodic":
            return self
        return Tail("periodic", block=self.block[-1:] + self.block[:-1])


ZERO_TAIL = Tail("zero")


@dataclass(frozen=True)
class ExtSeq:
    """An eventually-periodic exact-rational sequence, always canonical.

    Canonical form: the tail is minimal (see Tail) and the prefix
    carries no removable suffix, i.e. a trailing prefix entry equal to
    the unrolled tail is absorbed into the tail.  Two sequences are
    equal as functions on the 1-indexed coordinates iff their canonical
    forms are structurally equal.
    """

    prefix: tuple[Fraction, ...] = ()
    tail: Tail = ZERO_TAIL

    def __post_init__(self):
        prefix = list(_rats(self.prefix))
        tail = self.tail
        while prefix and prefix[-1] == tail.last_entry():
            prefix.pop()
            tail = tail.rotated_right()
        object.__setattr__(self, "prefix", tuple(prefix))
        object.__setattr__(self, "tail", tail)

    def value_at(self, i: int) -> Fraction:
        """Coordinate value; defined for every index i >= 1."""
        if i < 1:
            raise IndexError(f"coordinates are 1-indexed, got {i}")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        return self.tail.entry(i - len(self.prefix) - 1)

    @property
    def tail_period(self) -> int:
        return self.tail.period

    def window(self, length: int) -> tuple[Fraction, ...]:
        return tuple(self.value_at(i) for i in range(1, length + 1))

    def is_zero(self) -> bool:
        return not self.prefix and self.tail.kind == "zero"

    def __str__(self):
        head = ", ".join(str(v) for v in self.prefix)
        if self.tail.kind == "zero":
            return f"({head}; 0...)"
        if self.tail.kind == "const":
            return f"({head}; const {self.tail.value})"
        body = ", ".join(str(v) for v in self.tail.block)
        return f"({head}; repeat [{body}])"


def seq(prefix: Iterable = (), tail: Tail = ZERO_TAIL) -> ExtSeq:
    return ExtSeq(tuple(prefix), tail)


def zero_seq() -> ExtSeq:
    return ExtSeq()


def const_seq(value) -> ExtSeq:
    return ExtSeq((), Tail("const", rat(value)))


def periodic_seq(block: Iterable, prefix: Iterable = ()) -> ExtSeq:
    return ExtSeq(tuple(prefix), Tail("periodic", block=tuple(block)))


def basis_seq(i: int) -> ExtSeq:
    """The i-th coordinate unit vector (1-indexed)."""
    return ExtSeq((0,) * (i - 1) + (1,))


ONE = const_seq(1)


def aligned(a: ExtSeq, b: ExtSeq) -> tuple[int, int, tuple, tuple, tuple, tuple]:
    """Unroll two sequences to a common prefix length and tail period.

    Returns (L, q, prefix_a, block_a, prefix_b, block_b) where both
    prefixes have length L and both blocks length q; beyond coordinate
    L the two sequences repeat with the common period q.
    """
    L = max(len(a.prefix), len(b.prefix))
    q = math.lcm(a.tail_period, b.tail_period)
    pa = a.window(L)
    pb = b.window(L)
    ba = tuple(a.value_at(L + 1 + j) for j in range(q))
    bb = tuple(b.value_at(L + 1 + j) for j in range(q))
    return L, q, pa, ba, pb, bb


def seq_linear(a: ExtSeq, b: ExtSeq, alpha, beta) -> ExtSeq:
    """alpha*a + beta*b, coordinatewise, in canonical form."""
    al, be = rat(alpha), rat(beta)
    L, q, pa, ba, pb, bb = aligned(a, b)
    prefix = tuple(al * x + be * y for x, y in zip(pa, pb))
    block = tuple(al * x + be * y for x, y in zip(ba, bb))
    return ExtSeq(prefix, Tail("periodic", block=block) if len(block) > 1
                  else Tail("const", block[0]))


def seq_add(a: ExtSeq, b: ExtSeq) -> ExtSeq:
    return seq_linear(a, b, 1, 1)


def seq_sub(a: ExtSeq, b: ExtSeq) -> ExtSeq:
    return seq_linear(a, b, 1, -1)


def seq_scale(a: ExtSeq, alpha) -> ExtSeq:
    return seq_linear(a, zero_seq(), alpha, 0)


def seq_neg(a: ExtSeq) -> ExtSeq:
    return seq_scale(a, -1)


def seq_abs(a: ExtSeq) -> ExtSeq:
    """Coordinatewise absolute value."""
    prefix = tuple(abs(v) for v in a.prefix)
    if a.tail.kind == "zero":
        tail = ZERO_TAIL
    elif a.tail.kind == "const":
        tail = Tail("const", abs(a.tail.value))
    else:
        tail = Tail("periodic", block=tuple(abs(v) for v in a.tail.block))
    return ExtSeq(prefix, tail)


def seq_lattice(a: ExtSeq, b: ExtSeq, kind: str) -> ExtSeq:
    """Coordinatewise meet ('meet') or join ('join')."""
    if kind not in ("meet", "join"):
        raise ValueError(f"lattice kind must be 'meet' or 'join', got {kind!r}")
    op = min if kind == "meet" else max
    L, q, pa, ba, pb, bb = aligned(a, b)
    prefix = tuple(op(x, y) for x, y in zip(pa, pb))
    block = tuple(op(x, y) for x, y in zip(ba, bb))
    return ExtSeq(prefix, Tail("periodic", block=block) if len(block) > 1
                  else Tail("const", block[0]))


def seq_meet(a: ExtSeq, b: ExtSeq) -> ExtSeq:
    return seq_lattice(a, b, "meet")


def seq_join(a: ExtSeq, b: ExtSeq) -> ExtSeq:
    return seq_lattice(a, b, "join")


def seq_leq(a: ExtSeq, b: ExtSeq) -> bool:
    """True iff a_i <= b_i for every i, decided on prefix plus one period."""
    return first_violation(a, b) is None


def first_violation(a: ExtSeq, b: ExtSeq) -> int | None:
    """Smallest coordinate with a_i > b_i, or None when a <= b."""
    L, q, pa, ba, pb, bb = aligned(a, b)
    for i in range(L):
        if pa[i] > pb[i]:
            return i + 1
    for j in range(q):
        if ba[j] > bb[j]:
            return L + 1 + j
    return None


def first_difference(a: ExtSeq, b: ExtSeq) -> int | None:
    """Smallest coordinate where a and b differ, or None when equal."""
    L, q, pa, ba, pb, bb = aligned(a, b)
    for i in range(L):
        if pa[i] != pb[i]:
            return i + 1
    for j in range(q):
        if ba[j] != bb[j]:
            return L + 1 + j
    return None


def seq_norm(a: ExtSeq, kind: NormKind):
    """Exact norm value; returns INFINITE for the l1 norm of a sequence
    whose tail is not identically zero."""
    sup = Fraction(0)
    for v in a.prefix:
        sup = max(sup, abs(v))
    if a.tail.kind == "const":
        tail_sup = abs(a.tail.value)
    elif a.tail.kind == "periodic":
        tail_sup = max(abs(v) for v in a.tail.block)
    else:
        tail_sup = Fraction(0)
    if kind is NormKind.SUP:
        return max(sup, tail_sup)
    if kind is NormKind.L1:
        if a.tail.kind != "zero":
            return INFINITE
        return sum((abs(v) for v in a.prefix), Fraction(0))
    if kind is NormKind.SUP_LIMSUP:
        # limsup |a_i| equals the largest tail magnitude for this class
        return max(sup, tail_sup) + tail_sup
    raise ValueError(f"unknown norm kind {kind!r}")


def seq_in_space(a: ExtSeq, space: SpaceKind) -> bool:
    """Decide membership from the canonical form."""
    if space.kind in ("all", "linf"):
        return True
    if space.kind == "c":
        return a.tail.kind in ("zero", "const")
    if space.kind in ("c0", "l1"):
        return a.tail.kind == "zero"
    # canonical form never ends a prefix with the tail value, so a zero
    # tail means the prefix length bounds the support
    return a.tail.kind == "zero" and len(a.prefix) <= space.dim


def limit_functional(a: ExtSeq) -> Fraction:
    """The value every shift-invariant positive normalized limit assigns
    to an eventually periodic sequence: the mean of its tail block."""
    if a.tail.kind == "zero":
        return Fraction(0)
    if a.tail.kind == "const":
        return a.tail.value
    return sum(a.tail.block, Fraction(0)) / len(a.tail.block)


def seq_shift(a: ExtSeq, k: int = 1) -> ExtSeq:
    """Drop the first k coordinates."""
    if k < 0:
        raise ValueError("shift must be nonnegative")
    L = len(a.prefix)
    if k <= L:
        return ExtSeq(a.prefix[k:], a.tail)
    off = k - L
    if a.tail.kind != "periodic":
        return ExtSeq((), a.tail)
    q = len(a.tail.block)
    r = off % q
    return ExtSeq((), Tail("periodic", block=a.tail.block[r:] + a.tail.block[:r]))


def seq_with_coordinate(a: ExtSeq, i: int, value) -> ExtSeq:
    """Copy of a with coordinate i replaced."""
    if i < 1:
        raise IndexError(f"coordinates are 1-indexed, got {i}")
    n = max(i, len(a.prefix))
    prefix = list(a.window(n))
    prefix[i - 1] = rat(value)
    tail = a.tail
    if n > len(a.prefix) and tail.kind == "periodic":
        off = (n - len(a.prefix)) % tail.period
        tail = Tail("periodic", block=tail.block[off:] + tail.block[:off])
    return ExtSeq(tuple(prefix), tail)


def cesaro_mean(a: ExtSeq, modulus: int, residue: int) -> Fraction:
    """Exact Cesaro mean of a along the coordinates i with
    (i - 1) % modulus == residue."""
    if modulus < 1:
        raise ValueError("modulus must be positive")
    m = math.lcm(modulus, a.tail_period)
    start = len(a.prefix) + 1
    total = Fraction(0)
    count = 0
    for t in range(m):
        pos = start + t
        if (pos - 1) % modulus == residue % modulus:
            total += a.tail.entry(t)
            count += 1
    return total / count


# ---------------------------------------------------------------------------
# serialization

def seq_to_json(a: ExtSeq) -> dict:
    if a.tail.kind == "zero":
        tail = {"kind": "zero"}
    elif a.tail.kind == "const":
        tail = {"kind": "const", "value": str(a.tail.value)}
    else:
        tail = {"kind": "periodic", "block": [str(v) for v in a.tail.block]}
    return {"prefix": [str(v) for v in a.prefix], "tail": tail}


def _rat_from_json(obj, path: str) -> Fraction:
    if isinstance(obj, bool) or not isinstance(obj, (int, str)):
        raise SchemaError(path, f"expected rational string or integer, got {obj!r}")
    try:
        return rat(obj)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(path, f"bad rational {obj!r}") from None


def _rat_list_from_json(obj, path: str) -> tuple[Fraction, ...]:
    if not isinstance(obj, list):
        raise SchemaError(path, "expected a list of rationals")
    return tuple(_rat_from_json(v, f"{path}[{i}]") for i, v in enumerate(obj))


def seq_from_json(obj, path: str = "seq") -> ExtSeq:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object with 'prefix' and 'tail'")
    prefix = _rat_list_from_json(obj.get("prefix", []), f"{path}.prefix")
    tail_obj = obj.get("tail", {"kind": "zero"})
    if not isinstance(tail_obj, dict) or "kind" not in tail_obj:
        raise SchemaError(f"{path}.tail", "expected an object with 'kind'")
    kind = tail_obj["kind"]
    if kind == "zero":
        tail = ZERO_TAIL
    elif kind == "const":
        if "value" not in tail_obj:
            raise SchemaError(f"{path}.tail", "const tail needs 'value'")
        tail = Tail("const", _rat_from_json(tail_obj["value"], f"{path}.tail.value"))
    elif kind == "periodic":
        block = _rat_list_from_json(tail_obj.get("block", []), f"{path}.tail.block")
        if not block:
            raise SchemaError(f"{path}.tail.block", "periodic block must be nonempty")
        tail = Tail("periodic", block=block)
    else:
        raise SchemaError(f"{path}.tail.kind", f"unknown tail kind {kind!r}")
    return ExtSeq(prefix, tail)
