"""The binary word tree, its dipole kernel, and digit encodings.

Vertices of the infinite rooted tree are finite strings over {0, 1}; the
empty word is the root and serves as the graph origin.  Words are read
little-endian: the leftmost character is the 2^0 digit.  All conductances
on the tree are 1, so the Laplacian at an interior vertex is
(degree) * f(x) - sum of neighbor values, with integer output on integer
input.

The dipole at a vertex x is the function v_x(y) = length of the common
prefix of x and y.  It reproduces point evaluations against the energy
form and its Laplacian is delta_x plus a charge at the root.
"""

from __future__ import annotations

from fractions import Fraction

from .graphs import WeightedGraph, laplacian_apply

__all__ = [
    "ORIGIN",
    "check_word",
    "parent",
    "path_edges",
    "common_prefix_length",
    "dipole_value",
    "tree_graph",
    "words_up_to",
    "dipole_function",
    "dipole_defect",
    "encode_nat",
    "decode_nat",
    "sigma_maps",
    "prepend_digit",
    "encode_int",
    "decode_int",
    "encode_nadic",
    "cantor_encode",
]

ORIGIN = ""


def check_word(w: str) -> str:
    """Validate a binary word; returns it unchanged."""
    if not isinstance(w, str):
        raise TypeError(f"word must be a string, got {type(w).__name__}")
    for ch in w:
        if ch not in "01":
            raise ValueError(f"word {w!r} contains a character outside 0/1")
    return w


def parent(w: str) -> str:
    """Drop the last (highest) digit; the root has no parent."""
    check_word(w)
    if w == ORIGIN:
        raise ValueError("the root has no parent")
    return w[:-1]


def path_edges(w: str):
    """Edges of the geodesic from the root to w, nearest-root first.

    Each edge is a (parent, child) pair; the list has l(w) entries.
    """
    check_word(w)
    return [(w[:k], w[: k + 1]) for k in range(len(w))]


def common_prefix_length(x: str, y: str) -> int:
    """Number of shared leading characters, i.e. edges common to both root paths."""
    check_word(x)
    check_word(y)
    n = 0
    for a, b in zip(x, y):
        if a != b:
            break
        n += 1
    return n


def dipole_value(x: str, y: str) -> int:
    """v_x(y), the dipole at x evaluated at y.

    Equals the number of edges shared by the root paths of x and y.  The
    root itself carries no dipole (v_o would be identically zero), so
    x must be a nonempty word.
    """
    check_word(x)
    if x == ORIGIN:
        raise ValueError("no dipole is attached to the root")
    return common_prefix_length(x, y)


def words_up_to(depth: int, branching: int = 2):
    """All nonempty words of length <= depth, shortest first, lexicographic within a length."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    digits = [str(d) for d in range(branching)]
    out = []
    level = [ORIGIN]
    for _ in range(depth):
        level = [w + d for w in level for d in digits]
        out.extend(level)
    return out


def tree_graph(depth: int, branching: int = 2) -> WeightedGraph:
    """The tree truncated at the given depth, all conductances 1.

    Vertices are ordered by length, lexicographic within each length, with
    the root first; the root is the origin.
    """
    if depth < 1:
        raise ValueError("a truncated tree needs depth >= 1")
    vertices = [ORIGIN] + words_up_to(depth, branching)
    edges = [(w[:-1], w, 1) for w in vertices[1:]]
    return WeightedGraph(vertices, edges, ORIGIN)


def dipole_function(x: str, g: WeightedGraph) -> dict:
    """The dipole v_x sampled on the vertex set of a truncated tree."""
    check_word(x)
    if x == ORIGIN:
        raise ValueError("no dipole is attached to the root")
    return {y: common_prefix_length(x, y) for y in g.vertices}


def dipole_defect(x: str, depth: int) -> dict:
    """Pointwise residual of L v_x = delta_x - delta_o on a depth-cut tree.

    Returns {vertex: L v_x(vertex) - (delta_x - delta_o)(vertex)}, which is
    identically zero whenever depth >= l(x): the dipole is constant along
    every branch below x's path, so cutting the tree does not disturb the
    identity, leaves included.
    """
    check_word(x)
    if x == ORIGIN:
        raise ValueError("no dipole is attached to the root")
    g = tree_graph(depth)
    if len(x) > depth:
        raise ValueError(f"word {x!r} lies below the depth-{depth} cut")
    lap = laplacian_apply(g, dipole_function(x, g))
    out = {}
    for y in g.vertices:
        expected = (1 if y == x else 0) - (1 if y == ORIGIN else 0)
        out[y] = lap[y] - expected
    return out


def encode_nat(w: str) -> int:
    """Read a word as a nonnegative integer, leftmost character the 2^0 digit."""
    check_word(w)
    return sum(int(ch) << k for k, ch in enumerate(w))


def decode_nat(n: int) -> str:
    """Canonical word for a nonnegative integer: shortest, so no high zero digit.

    decode_nat(0) is the root; encode_nat(decode_nat(n)) == n always, and
    decode_nat(encode_nat(w)) strips trailing zeros from w.
    """
    if n < 0:
        raise ValueError("decode_nat takes a nonnegative integer")
    digits = []
    m = n
    while m:
        digits.append(str(m & 1))
        m >>= 1
    return "".join(digits)


def sigma_maps(n: int, bit: int) -> int:
    """The two inverse branches of doubling on integers: n -> 2n + bit."""
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    return 2 * n + bit


def prepend_digit(w: str, bit: int) -> str:
    """Realize sigma on words: prepend the new low digit on the left.

    encode_nat(prepend_digit(w, b)) == 2 * encode_nat(w) + b.
    """
    check_word(w)
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    return str(bit) + w


def encode_int(w: str) -> int:
    """Read a nonempty word as a signed integer.

    With p = l(w) - 1 the value is -2^p + sum_{k<=p} x_k 2^k, i.e. the
    plain binary value shifted down by 2^p.  This folds both signs into
    one alphabet: "1" -> 0, "0" -> -1, "111" -> 3.
    """
    check_word(w)
    if w == ORIGIN:
        raise ValueError("encode_int needs a nonempty word")
    return encode_nat(w) - (1 << (len(w) - 1))


def decode_int(n: int) -> str:
    """Shortest word whose encode_int is n.

    Picks the least p with 0 <= n + 2^p < 2^(p+1) and writes n + 2^p in
    p + 1 binary digits, low digit first.
    """
    if n >= 0:
        p = n.bit_length() if n else 0
    else:
        p = (-n - 1).bit_length()
    return "".join(str((n + (1 << p)) >> k & 1) for k in range(p + 1))


def encode_nadic(w: str, base: int, residues) -> int:
    """Read a base-N word through a complete residue system.

    residues[d] is the integer substituted for digit d; the residues must
    hit every class mod base exactly once (so the induced encoding of the
    N-ary tree is a bijection onto the integers it reaches).  The word is
    little-endian: value = sum residues[digit_k] * base^k.  With base 2
    and residues [0, 1] this is encode_nat.
    """
    if base < 2:
        raise ValueError("base must be at least 2")
    residues = list(residues)
    if len(residues) != base or sorted(r % base for r in residues) != list(range(base)):
        raise ValueError("residues are not a complete residue system for the base")
    if not isinstance(w, str):
        raise TypeError("word must be a string")
    total = 0
    power = 1
    for ch in w:
        if not ch.isdigit() or int(ch) >= base:
            raise ValueError(f"digit {ch!r} outside the base-{base} alphabet")
        total += residues[int(ch)] * power
        power *= base
    return total


def cantor_encode(int_digits: str, frac_digits: str = "") -> Fraction:
    """Exact rational value of a two-sided ternary string with digits in {0, 2}.

    int_digits is little-endian (3^0 first); frac_digits lists the
    3^-1, 3^-2, ... digits in order.  The image is the arithmetic span of
    the middle-thirds set intersected with the rationals this finite
    truncation can reach.
    """
    value = Fraction(0)
    power = Fraction(1)
    for ch in int_digits:
        if ch not in "02":
            raise ValueError(f"digit {ch!r} outside the allowed set 0/2")
        value += int(ch) * power
        power *= 3
    scale = Fraction(1, 3)
    for ch in frac_digits:
        if ch not in "02":
            raise ValueError(f"digit {ch!r} outside the allowed set 0/2")
        value += int(ch) * scale
        scale /= 3
    return value
