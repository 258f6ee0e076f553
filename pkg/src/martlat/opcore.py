"""Positive operators in closed form.

Two shapes cover every operator in the corpus: a block-periodic matrix
(finite head matrix plus one repeating tail block) and a rank-one map
built from a limit-type functional.  Both act exactly on eventually
periodic sequences and the algebra is closed under composition, so
products such as projection semigroup laws can be checked symbolically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .seqcore import (
    ExtSeq,
    NormKind,
    SchemaError,
    Tail,
    _rat_from_json,
    _rat_list_from_json,
    basis_seq,
    cesaro_mean,
    rat,
    seq_scale,
    seq_from_json,
    seq_leq,
    seq_to_json,
    zero_seq,
)


class OperatorAlignmentError(ValueError):
    """Two block operators whose block segmentations cannot be aligned."""


class UnsupportedOperationError(ValueError):
    """An operation that is not defined for this operator shape."""


Matrix = tuple[tuple[Fraction, ...], ...]


def _matrix(rows: Iterable[Iterable]) -> Matrix:
    out = tuple(tuple(rat(v) for v in row) for row in rows)
    for row in out:
        if len(row) != len(out):
            raise ValueError("matrix must be square")
    return out


def _identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(1 if i == j else 0) for j in range(n))
                 for i in range(n))


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(n)), Fraction(0))
              for j in range(n))
        for i in range(n))


def _matvec(a: Matrix, v: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    return tuple(sum((row[k] * v[k] for k in range(len(row))), Fraction(0))
                 for row in a)


@dataclass(frozen=True)
class Functional:
    """Positive-linear limit-type functional on eventually periodic
    sequences.

    head_weights act on the leading coordinates; residue_weights[r]
    weights the Cesaro mean of the argument along the coordinates i with
    (i - 1) % modulus == r.  On an argument whose tail is aligned to the
    modulus this reduces to a plain weighting of the tail block entries.
    Construction canonicalizes (trailing zero head weights trimmed,
    modulus minimal), so equal functionals compare equal structurally.
    """

    head_weights: tuple[Fraction, ...] = ()
    residue_weights: tuple[Fraction, ...] = (Fraction(0),)

    def __post_init__(self):
        head = list(rat(v) for v in self.head_weights)
        while head and head[-1] == 0:
            head.pop()
        rw = tuple(rat(v) for v in self.residue_weights)
        if not rw:
            raise ValueError("residue_weights must be nonempty")
        q = len(rw)
        for qr in range(1, q + 1):
            if q % qr == 0 and all(rw[c] == rw[c % qr] for c in range(q)):
                rw = tuple(v * (q // qr) for v in rw[:qr])
                break
        object.__setattr__(self, "head_weights", tuple(head))
        object.__setattr__(self, "residue_weights", rw)

    @property
    def modulus(self) -> int:
        return len(self.residue_weights)

    def evaluate(self, a: ExtSeq) -> Fraction:
        total = Fraction(0)
        for i, w in enumerate(self.head_weights, start=1):
            if w:
                total += w * a.value_at(i)
        q = self.modulus
        for r, w in enumerate(self.residue_weights):
            if w:
                total += w * cesaro_mean(a, q, r)
        return total

    def scaled(self, factor) -> "Functional":
        c = rat(factor)
        return Functional(tuple(c * w for w in self.head_weights),
                          tuple(c * w for w in self.residue_weights))

    def is_positive(self) -> bool:
        return all(w >= 0 for w in self.head_weights) and \
            all(w >= 0 for w in self.residue_weights)


def mean_functional() -> Functional:
    """The common restriction of every Banach limit to this class."""
    return Functional((), (Fraction(1),))


@dataclass(frozen=True)
class BlockOperator:
    """head acts on coordinates 1..h, then tail_block maps each
    consecutive block of `period` coordinates to itself.

    Construction canonicalizes: the tail block is reduced to its
    minimal block-diagonal period and head rows that merely repeat the
    tail block are stripped, so shape equality of canonical forms
    coincides with equality of the maps.
    """

    head: Matrix = ()
    tail_block: Matrix = ((Fraction(1),),)

    def __post_init__(self):
        head = _matrix(self.head)
        tb = _matrix(self.tail_block)
        if not tb:
            raise ValueError("tail block must be nonempty")
        tb = self._reduce_period(tb)
        head = self._strip_head(head, tb)
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "tail_block", tb)

    @staticmethod
    def _reduce_period(tb: Matrix) -> Matrix:
        q = len(tb)
        for qr in range(1, q + 1):
            if q % qr:
                continue
            ok = True
            for i in range(q):
                for j in range(q):
                    want = tb[i % qr][j % qr] if i // qr == j // qr else Fraction(0)
                    if tb[i][j] != want:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                return tuple(row[:qr] for row in tb[:qr])
        return tb

    @staticmethod
    def _strip_head(head: Matrix, tb: Matrix) -> Matrix:
        q = len(tb)
        h = len(head)
        while h >= q:
            base = h - q
            ok = all(head[base + i][base + j] == tb[i][j]
                     for i in range(q) for j in range(q))
            ok = ok and all(head[i][j] == 0
                            for i in range(base, h) for j in range(base))
            ok = ok and all(head[i][j] == 0
                            for i in range(base) for j in range(base, h))
            if not ok:
                break
            head = tuple(row[:base] for row in head[:base])
            h = base
        return head

    @property
    def head_dim(self) -> int:
        return len(self.head)

    @property
    def period(self) -> int:
        return len(self.tail_block)

    def normalized(self, head_dim: int, period: int) -> tuple[Matrix, Matrix]:
        """Head and tail matrices of the same map at a larger shape.
        The target must preserve the block alignment."""
        h, q = self.head_dim, self.period
        if period % q or head_dim < h or (head_dim - h) % q:
            raise OperatorAlignmentError(
                f"cannot renormalize shape ({h},{q}) to ({head_dim},{period})")
        big_head = []
        for i in range(head_dim):
            row = [Fraction(0)] * head_dim
            if i < h:
                row[:h] = self.head[i]
            else:
                block, slot = divmod(i - h, q)
                start = h + block * q
                row[start:start + q] = self.tail_block[slot]
            big_head.append(tuple(row))
        copies = period // q
        big_tail = []
        for i in range(period):
            row = [Fraction(0)] * period
            block, slot = divmod(i, q)
            row[block * q:(block + 1) * q] = self.tail_block[slot]
            big_tail.append(tuple(row))
        return tuple(big_head), tuple(big_tail)


@dataclass(frozen=True)
class RankOneOperator:
    """a -> functional(a) * out."""

    functional: Functional
    out: ExtSeq


Operator = Union[BlockOperator, RankOneOperator]


def identity_operator() -> BlockOperator:
    return BlockOperator((), ((Fraction(1),),))


def block_operator(head: Iterable[Iterable], tail_block: Iterable[Iterable]) -> BlockOperator:
    return BlockOperator(_matrix(head), _matrix(tail_block))


def op_apply(E: Operator, a: ExtSeq) -> ExtSeq:
    """Exact image of a under E, in canonical form."""
    if isinstance(E, RankOneOperator):
        return seq_scale(E.out, E.functional.evaluate(a))
    h, q = E.head_dim, E.period
    m = math.lcm(q, a.tail_period)
    # number of input blocks needed before the input turns periodic
    over = max(0, len(a.prefix) - h)
    k0 = -(-over // q)
    out: list[Fraction] = list(_matvec(E.head, a.window(h)))
    for k in range(k0):
        vals = tuple(a.value_at(h + k * q + t + 1) for t in range(q))
        out.extend(_matvec(E.tail_block, vals))
    start = h + k0 * q
    block: list[Fraction] = []
    for j in range(m // q):
        vals = tuple(a.value_at(start + j * q + t + 1) for t in range(q))
        block.extend(_matvec(E.tail_block, vals))
    return ExtSeq(tuple(out), Tail("periodic", block=tuple(block))
                  if len(block) > 1 else Tail("const", block[0]))


def _common_shape(A: BlockOperator, B: BlockOperator) -> tuple[int, int]:
    q = math.lcm(A.period, B.period)
    lo = max(A.head_dim, B.head_dim)
    for H in range(lo, lo + q + 1):
        if (H - A.head_dim) % A.period == 0 and (H - B.head_dim) % B.period == 0:
            return H, q
    raise OperatorAlignmentError(
        f"block alignments ({A.head_dim},{A.period}) and "
        f"({B.head_dim},{B.period}) cannot be reconciled")


def pullback_functional(f: Functional, E: BlockOperator) -> Functional:
    """The functional a -> f(E a), recomputed in closed form."""
    h, q, tb = E.head_dim, E.period, E.tail_block
    # head part: each head weight pulls in one row of E
    head: dict[int, Fraction] = {}
    for i, w in enumerate(f.head_weights, start=1):
        if not w:
            continue
        if i <= h:
            for j in range(h):
                head[j + 1] = head.get(j + 1, Fraction(0)) + w * E.head[i - 1][j]
        else:
            block, slot = divmod(i - h - 1, q)
            start = h + block * q
            for j in range(q):
                pos = start + j + 1
                head[pos] = head.get(pos, Fraction(0)) + w * tb[slot][j]
    # residue part: far-out rows permute the Cesaro classes mod lcm
    Q = math.lcm(q, f.modulus)
    rw = [Fraction(0)] * Q
    scale = Fraction(f.modulus, Q)
    for c in range(Q):
        w = f.residue_weights[c % f.modulus]
        if not w:
            continue
        u = (c - h) % q
        for j in range(q):
            if tb[u][j]:
                rw[(c - u + j) % Q] += w * scale * tb[u][j]
    width = max(head) if head else 0
    head_weights = tuple(head.get(i, Fraction(0)) for i in range(1, width + 1))
    return Functional(head_weights, tuple(rw))


def op_compose(A: Operator, B: Operator) -> Operator:
    """Closed-form composite A @ B (apply B first)."""
    if isinstance(A, RankOneOperator) and isinstance(B, RankOneOperator):
        return RankOneOperator(B.functional.scaled(A.functional.evaluate(B.out)),
                               A.out)
    if isinstance(A, RankOneOperator):
        return RankOneOperator(pullback_functional(A.functional, B), A.out)
    if isinstance(B, RankOneOperator):
        return RankOneOperator(B.functional, op_apply(A, B.out))
    H, Q = _common_shape(A, B)
    head_a, tail_a = A.normalized(H, Q)
    head_b, tail_b = B.normalized(H, Q)
    return BlockOperator(_matmul(head_a, head_b), _matmul(tail_a, tail_b))


def _probe_battery(extent: int, modulus: int) -> list[ExtSeq]:
    probes = [basis_seq(i) for i in range(1, extent + 2 * modulus + 1)]
    for r in range(modulus):
        block = tuple(Fraction(1 if j == r else 0) for j in range(modulus))
        probes.append(ExtSeq((), Tail("periodic", block=block))
                      if modulus > 1 else ExtSeq((), Tail("const", Fraction(1))))
    return probes


def _extent(E: Operator) -> tuple[int, int]:
    if isinstance(E, BlockOperator):
        return E.head_dim, E.period
    return len(E.functional.head_weights), E.functional.modulus


def op_equal(A: Operator, B: Operator) -> bool:
    """Extensional equality on the eventually periodic class.

    Canonical structural equality is the fast path; otherwise the two
    actions are compared on a spanning probe battery (unit vectors
    through the combined locality window plus one indicator per residue
    class), which determines a block or rank-one map completely.
    """
    if A == B:
        return True
    ha, qa = _extent(A)
    hb, qb = _extent(B)
    modulus = math.lcm(qa, qb)
    extent = max(ha, hb)
    for probe in _probe_battery(extent, modulus):
        if op_apply(A, probe) != op_apply(B, probe):
            return False
    return True


def op_is_positive(E: Operator) -> bool:
    if isinstance(E, BlockOperator):
        return all(v >= 0 for row in E.head for v in row) and \
            all(v >= 0 for row in E.tail_block for v in row)
    return E.functional.is_positive() and seq_leq(zero_seq(), E.out)


def op_is_projection(E: Operator) -> bool:
    return op_equal(op_compose(E, E), E)


def op_is_lattice_hom(E: Operator) -> bool:
    """True iff |E a| = E |a| for every a.

    A block operator acts independently on its head and on each tail
    block, so it commutes with the absolute value exactly when every
    row of those matrices is nonnegative with at most one nonzero entry
    (any row mixing two coordinates fails on a +/- sign pattern).
    """
    if isinstance(E, RankOneOperator):
        raise UnsupportedOperationError(
            "lattice-homomorphism check is unsupported for rank-one operators")
    for matrix in (E.head, E.tail_block):
        for row in matrix:
            nonzero = [v for v in row if v != 0]
            if len(nonzero) > 1 or any(v < 0 for v in nonzero):
                return False
    return True


def op_norm(E: Operator, kind: NormKind) -> Fraction:
    """Exact operator norm for nonnegative block operators.

    l1 norm is the largest column sum, sup norm the largest row sum,
    taken over the head and the tail block."""
    if isinstance(E, RankOneOperator):
        raise UnsupportedOperationError("operator norm unsupported for rank-one operators")
    if kind is NormKind.SUP_LIMSUP:
        raise UnsupportedOperationError("operator norm unsupported for the sup+limsup norm")
    if not op_is_positive(E):
        raise UnsupportedOperationError("operator norm requires nonnegative entries")
    h, q = E.head_dim, E.period
    if kind is NormKind.L1:
        sums = [sum((E.head[i][j] for i in range(h)), Fraction(0)) for j in range(h)]
        sums += [sum((E.tail_block[i][j] for i in range(q)), Fraction(0))
                 for j in range(q)]
    else:
        sums = [sum(row, Fraction(0)) for row in E.head]
        sums += [sum(row, Fraction(0)) for row in E.tail_block]
    return max(sums)


def matrix_of(E: Operator, d: int) -> Matrix:
    """The operator as a d x d matrix; requires the action to stay
    within the leading d coordinates."""
    cols = []
    for j in range(1, d + 1):
        image = op_apply(E, basis_seq(j))
        if image.tail.kind != "zero" or len(image.prefix) > d:
            raise UnsupportedOperationError(
                f"operator does not act within the leading {d} coordinates")
        cols.append(image.window(d))
    return tuple(tuple(cols[j][i] for j in range(d)) for i in range(d))


# ---------------------------------------------------------------------------
# standard families

def pair_averaging_operator(n: int) -> BlockOperator:
    """Identity on the first 2n coordinates, then each consecutive pair
    is replaced by its average."""
    half = Fraction(1, 2)
    return BlockOperator(_identity(2 * n), ((half, half), (half, half)))


def triple_averaging_operator(n: int) -> BlockOperator:
    """Identity on the first 3n coordinates, then each triple (a, b, c)
    maps to ((a+b)/2, (a+b)/2, c)."""
    half = Fraction(1, 2)
    zero, one = Fraction(0), Fraction(1)
    return BlockOperator(_identity(3 * n),
                         ((half, half, zero), (half, half, zero), (zero, zero, one)))


def mean_projection_operator() -> RankOneOperator:
    """Rank-one projection sending a to (limit mean of a) times the
    constant-one sequence."""
    return RankOneOperator(mean_functional(), ExtSeq((), Tail("const", Fraction(1))))


def corner_projection(alpha) -> Matrix:
    """The 2x2 positive projection [[0,0],[alpha,1]] onto the second
    coordinate of a pair."""
    return ((Fraction(0), Fraction(0)), (rat(alpha), Fraction(1)))


def geometric_pairs_operator(n: int, trunc: int) -> BlockOperator:
    """Level n of the pairwise geometric filtration on l1, truncated at
    `trunc` pairs: identity on the first n-1 pairs, then the corner
    projection with halving weights 2^(1-k) on pair k, and the weight-0
    corner beyond the truncation."""
    if not 1 <= n <= trunc:
        raise ValueError("level must lie within the truncation")
    head: list[tuple[Fraction, ...]] = []
    d = 2 * trunc
    for k in range(1, trunc + 1):
        rows = _identity(2) if k < n else corner_projection(Fraction(1, 2 ** (k - 1)))
        for i, row in enumerate(rows):
            full = [Fraction(0)] * d
            full[2 * (k - 1):2 * k] = row
            head.append(tuple(full))
    return BlockOperator(tuple(head), corner_projection(0))


# ---------------------------------------------------------------------------
# serialization

def op_to_json(E: Operator) -> dict:
    if isinstance(E, BlockOperator):
        return {
            "kind": "block",
            "head": [[str(v) for v in row] for row in E.head],
            "period": E.period,
            "tail_block": [[str(v) for v in row] for row in E.tail_block],
        }
    return {
        "kind": "rank_one",
        "functional": {
            "head_weights": [str(v) for v in E.functional.head_weights],
            "residue_weights": [str(v) for v in E.functional.residue_weights],
        },
        "out": seq_to_json(E.out),
    }


def _matrix_from_json(obj, path: str) -> Matrix:
    if not isinstance(obj, list):
        raise SchemaError(path, "expected a matrix (list of rows)")
    return tuple(_rat_list_from_json(row, f"{path}[{i}]") for i, row in enumerate(obj))


def op_from_json(obj, path: str = "operator") -> Operator:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError(path, "expected an operator object with 'kind'")
    kind = obj["kind"]
    if kind == "block":
        head = _matrix_from_json(obj.get("head", []), f"{path}.head")
        tail = _matrix_from_json(obj.get("tail_block", []), f"{path}.tail_block")
        if not tail:
            raise SchemaError(f"{path}.tail_block", "tail block must be nonempty")
        try:
            op = BlockOperator(head, tail)
        except ValueError as err:
            raise SchemaError(path, str(err)) from None
        declared = obj.get("period", len(tail))
        if declared != len(tail):
            raise SchemaError(f"{path}.period",
                              f"period {declared!r} does not match the tail block")
        return op
    if kind == "rank_one":
        f_obj = obj.get("functional")
        if not isinstance(f_obj, dict):
            raise SchemaError(f"{path}.functional", "expected a functional object")
        hw = _rat_list_from_json(f_obj.get("head_weights", []),
                                 f"{path}.functional.head_weights")
        rw = _rat_list_from_json(f_obj.get("residue_weights", []),
                                 f"{path}.functional.residue_weights")
        if not rw:
            raise SchemaError(f"{path}.functional.residue_weights",
                              "residue weights must be nonempty")
        out = seq_from_json(obj.get("out"), f"{path}.out")
        return RankOneOperator(Functional(hw, rw), out)
    raise SchemaError(f"{path}.kind", f"unknown operator kind {kind!r}")
