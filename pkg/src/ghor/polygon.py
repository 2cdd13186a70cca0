"""Fundamental 2N-gon, crossing words and a lazily grown universal cover.

Sides of the polygon are numbered 1..2N counterclockwise and side k is glued
to side k+N.  A crossing word is a sequence of nonzero integers: the letter +k
records an outward crossing through side k and -k an outward crossing through
side k+N.  Crossing side s from a tile and then crossing side s+N from the new
tile returns to the start, so -k is the inverse letter of +k and crossing
words are words in the deck group of the cover.

The cover is represented combinatorially.  Tiles are created on demand and
hash-consed, so the same deck transformation always yields the same ``Tile``
object.  Equality of tiles is decided by a word-problem backend chosen from N:

* N = 2: the deck group is abelian and tiles are keyed by their class vector.
* N = 3: the corner walk presents a free product Z^2 * Z; tiles are keyed by
  the syllable normal form in that product.
* N >= 4: the relator satisfies the C'(1/6) small cancellation condition, so
  Dehn's algorithm decides equality.  Tiles are bucketed by their images in a
  few finite permutation quotients and compared with Dehn's algorithm inside
  a bucket.

Canonical tile names are shortlex-minimal crossing words, computed by
breadth-first closure from the base tile when they are requested.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

CrossingWord = tuple[int, ...]
ClassVector = tuple[int, ...]


class MalformedWord(ValueError):
    """A crossing word uses a letter outside the polygon's alphabet."""


class DehnNotApplicable(RuntimeError):
    """The relator fails the C'(1/6) piece condition, so Dehn's algorithm is not exact."""


@dataclass(frozen=True)
class Polygon:
    """Regular 2N-gon with opposite sides identified."""

    half_sides: int

    def __post_init__(self):
        n = self.half_sides
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 2:
            raise ValueError(f"polygon needs half_sides >= 2, got {n!r}")
        object.__setattr__(self, "half_sides", int(n))

    @property
    def sides(self) -> int:
        return 2 * self.half_sides

    def pair(self, side: int) -> int:
        """The side glued to ``side``."""
        self._check_side(side)
        return (side - 1 + self.half_sides) % self.sides + 1

    def letter(self, side: int) -> int:
        """Crossing letter for an outward crossing through ``side``."""
        self._check_side(side)
        return side if side <= self.half_sides else -(side - self.half_sides)

    def side(self, letter: int) -> int:
        """Side crossed outward by ``letter``."""
        self.check_word((letter,))
        return letter if letter > 0 else self.half_sides - letter

    def alphabet(self) -> CrossingWord:
        """Letters in shortlex order: +1, -1, +2, -2, ..."""
        return tuple(s * k for k in range(1, self.half_sides + 1) for s in (1, -1))

    def check_word(self, word: Iterable[int]) -> CrossingWord:
        word = tuple(word)
        if _letter_set(self.half_sides).issuperset(word) and all(type(x) is int for x in word):
            return word
        for x in word:
            if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
                raise MalformedWord(f"letter {x!r} is not an integer")
            if x == 0 or abs(x) > self.half_sides:
                raise MalformedWord(f"letter {x} outside [-{self.half_sides}, {self.half_sides}]")
        return tuple(int(x) for x in word)

    def _check_side(self, side):
        if not 1 <= side <= self.sides:
            raise ValueError(f"side {side} outside 1..{self.sides}")


@functools.lru_cache(maxsize=None)
def _letter_set(n: int) -> frozenset:
    return frozenset(s * k for k in range(1, n + 1) for s in (1, -1))


def abelianize(word: Sequence[int], polygon: Polygon) -> ClassVector:
    """Class vector of a crossing word: entry k is #(+k) - #(-k)."""
    word = polygon.check_word(word)
    v = [0] * polygon.half_sides
    for x in word:
        v[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(v)


def invert_word(word: Sequence[int]) -> CrossingWord:
    return tuple(-x for x in reversed(word))


def free_reduce(word: Sequence[int]) -> CrossingWord:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def derive_vertex_relator(polygon: Polygon) -> CrossingWord:
    """Word read off by walking around the identified polygon corner.

    Corner c_j sits between sides j and j+1 (c_0 between sides 2N and 1).
    Leaving a tile through the side after corner c_j enters the neighbour at
    corner c_{j+N+1}.  For even N the N-th step reaches corner c_N and the
    walk simply continues; for odd N the corners fall into two classes that
    are pinched together, and the walk continues from c_N on the second
    sheet.  Either way the result has length 2N, visits 2N tiles and has the
    form x_1 ... x_N x_1^-1 ... x_N^-1 with x_k = +k for odd k, -k for even k.
    """
    n, m = polygon.half_sides, polygon.sides
    corner = 0
    letters = []
    for step in range(m):
        if step == n:
            corner = n
        letters.append(polygon.letter(corner % m + 1))
        corner = (corner + n + 1) % m
    return tuple(letters)


def symmetrized(relator: Sequence[int]) -> list[CrossingWord]:
    """All cyclic rotations of the relator and of its inverse."""
    out = []
    for r in (tuple(relator), invert_word(relator)):
        for i in range(len(r)):
            out.append(r[i:] + r[:i])
    return out


def max_piece_length(relator: Sequence[int]) -> int:
    """Longest common prefix of two distinct members of the symmetrized set."""
    words = symmetrized(relator)
    best = 0
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            a, b = words[i], words[j]
            k = 0
            while k < len(a) and a[k] == b[k]:
                k += 1
            best = max(best, k)
    return best


def satisfies_c6(relator: Sequence[int]) -> bool:
    """Metric small cancellation C'(1/6): every piece is shorter than |r|/6."""
    return 6 * max_piece_length(relator) < len(relator)


@functools.lru_cache(maxsize=None)
def _dehn_table(relator: CrossingWord):
    if not satisfies_c6(relator):
        raise DehnNotApplicable(f"relator {relator} fails the C'(1/6) piece condition")
    table: dict[int, list[CrossingWord]] = {}
    for w in symmetrized(relator):
        table.setdefault(w[0], []).append(w)
    return table


def dehn_reduce(word: Sequence[int], relator: Sequence[int]) -> CrossingWord:
    """Dehn's algorithm: shorten ``word`` by replacing long relator pieces.

    Repeatedly replaces a subword equal to more than half of a cyclic
    rotation of the relator (or its inverse) by the inverse of the remaining
    part, then freely reduces.  The word represents the identity exactly when
    the result is empty.
    """
    relator = tuple(relator)
    table = _dehn_table(relator)
    size = len(relator)
    w = list(free_reduce(word))
    changed = True
    while changed:
        changed = False
        for i in range(len(w)):
            for rot in table.get(w[i], ()):
                k = 1
                while k < size and i + k < len(w) and w[i + k] == rot[k]:
                    k += 1
                if 2 * k > size:
                    w = list(free_reduce(w[:i] + list(invert_word(rot[k:])) + w[i + k:]))
                    changed = True
                    break
            if changed:
                break
    return tuple(w)


# ---------------------------------------------------------------------------
# word-problem backends


class _AbelianBackend:
    """N = 2: the deck group is Z^2."""

    exact = True

    def __init__(self, polygon: Polygon):
        self.polygon = polygon

    def identity(self):
        return (0,) * self.polygon.half_sides

    def advance(self, state, letter):
        v = list(state)
        v[abs(letter) - 1] += 1 if letter > 0 else -1
        return tuple(v)

    def key(self, state) -> Hashable:
        return state

    def equal(self, w1, w2) -> bool:
        return abelianize(w1, self.polygon) == abelianize(w2, self.polygon)


# N = 3: with t = x1, v = x2 x1, d = x2 x3 the relator x1x2x3 = x3x2x1 becomes
# [v, d] = 1 with t free, so the group is <t> * <v, d>.  Each crossing letter
# expands into syllables (0, n) for t^n and (1, i, j) for v^i d^j.
_FREE_PRODUCT_LETTERS = {
    1: ((0, 1),),
    -1: ((0, -1),),
    2: ((0, 1), (1, -1, 0)),
    -2: ((1, 1, 0), (0, -1)),
    3: ((0, 1), (1, -1, 1)),
    -3: ((1, 1, -1), (0, -1)),
}


def _push_syllable(sylls: list, syl: tuple) -> None:
    if sylls and sylls[-1][0] == syl[0]:
        last = sylls.pop()
        merged = (last[0],) + tuple(a + b for a, b in zip(last[1:], syl[1:]))
        if any(merged[1:]):
            sylls.append(merged)
    else:
        sylls.append(syl)


class _FreeProductBackend:
    """N = 3: syllable normal form in Z * Z^2."""

    exact = True

    def __init__(self, polygon: Polygon):
        self.polygon = polygon

    def identity(self):
        return ()

    def advance(self, state, letter):
        sylls = list(state)
        for syl in _FREE_PRODUCT_LETTERS[letter]:
            _push_syllable(sylls, syl)
        return tuple(sylls)

    def key(self, state) -> Hashable:
        return state

    def normal_form(self, word):
        state = self.identity()
        for x in word:
            state = self.advance(state, x)
        return state

    def equal(self, w1, w2) -> bool:
        return self.normal_form(w1) == self.normal_form(w2)


def _random_relator_images(relator, n_gens, points, rng, tries=200):
    """Permutations of ``points`` points satisfying the corner relator.

    The relator reads x_1..x_N = x_N..x_1 with x_k = a_k^(+-1).  Random
    x_1..x_{N-1} fix A = x_1...x_{N-1} and B = x_{N-1}...x_1; x_N must
    conjugate A to B, which is solvable when the cycle types agree.
    """
    for _ in range(tries):
        xs = [rng.permutation(points) for _ in range(n_gens - 1)]
        a = np.arange(points)
        for x in xs:
            a = x[a]
        b = np.arange(points)
        for x in reversed(xs):
            b = x[b]
        ca, cb = _cycles(a), _cycles(b)
        if sorted(map(len, ca)) != sorted(map(len, cb)):
            continue
        rng.shuffle(ca)
        ca.sort(key=len)
        cb.sort(key=len)
        conj = np.empty(points, dtype=np.int64)
        for c1, c2 in zip(ca, cb):
            shift = int(rng.integers(len(c2)))
            for i, p in enumerate(c1):
                conj[p] = c2[(i + shift) % len(c2)]
        xs.append(conj)
        images = {}
        for k, x in enumerate(xs, start=1):
            inv = np.argsort(x)
            pos, neg = (x, inv) if k % 2 else (inv, x)
            images[k], images[-k] = pos, neg
        state = np.arange(points)
        for letter in relator:
            state = images[letter][state]
        assert np.array_equal(state, np.arange(points))
        return images
    raise RuntimeError("no permutation image found")  # pragma: no cover


def _cycles(perm):
    seen = np.zeros(len(perm), dtype=bool)
    out = []
    for i in range(len(perm)):
        if not seen[i]:
            c = []
            j = i
            while not seen[j]:
                seen[j] = True
                c.append(j)
                j = perm[j]
            out.append(c)
    return out


class _DehnBackend:
    """N >= 4: buckets from finite permutation quotients, refined by Dehn's algorithm.

    A tile's bucket key is the image of one marked point under the deck
    transformation in each quotient; equal transformations always share a
    key, and keys of distinct ones rarely collide.
    """

    exact = False

    def __init__(self, polygon: Polygon, quotients: int = 6, points: int = 32, seed: int = 20231):
        self.polygon = polygon
        self.relator = derive_vertex_relator(polygon)
        _dehn_table(self.relator)
        rng = np.random.default_rng(seed)
        images = [
            _random_relator_images(self.relator, polygon.half_sides, points, rng)
            for _ in range(quotients)
        ]
        self.images = {
            x: tuple(tuple(int(p) for p in img[x]) for img in images) for x in polygon.alphabet()
        }
        self._quotients = quotients

    def identity(self):
        return (0,) * self._quotients

    def advance(self, state, letter):
        return tuple(img[p] for img, p in zip(self.images[letter], state))

    def key(self, state) -> Hashable:
        return state

    def reduce(self, word):
        return dehn_reduce(word, self.relator)

    def equal(self, w1, w2) -> bool:
        return self.reduce(tuple(w1) + invert_word(w2)) == ()


def _backend_for(polygon: Polygon):
    if polygon.half_sides == 2:
        return _AbelianBackend(polygon)
    if polygon.half_sides == 3:
        return _FreeProductBackend(polygon)
    return _DehnBackend(polygon)


# ---------------------------------------------------------------------------
# tessellation


class Tile:
    """One polygon of the universal cover.  Compare tiles with ``is`` or ``==``."""

    __slots__ = ("tessellation", "index", "word", "state", "_neighbors")

    def __init__(self, tessellation, index, word, state):
        self.tessellation = tessellation
        self.index = index
        self.word = word
        self.state = state
        self._neighbors: dict[int, Tile] = {}

    @property
    def id(self) -> CrossingWord:
        """Shortlex-minimal crossing word from the base tile."""
        return self.tessellation.canonical_word(self)

    def neighbor(self, side: int) -> "Tile":
        return self.tessellation.neighbor(self, side)

    def __repr__(self):
        return f"Tile({list(self.word)})"


@dataclass(frozen=True)
class LiftedVertex:
    """A quiver vertex placed in a specific tile of the cover."""

    tile: Tile
    vertex: Hashable


class Tessellation:
    """Lazily built tiling of the universal cover by copies of the polygon."""

    def __init__(self, polygon: Polygon):
        self.polygon = polygon
        self.relator = derive_vertex_relator(polygon)
        self._backend = _backend_for(polygon)
        self._tiles: list[Tile] = []
        self._buckets: dict[Hashable, list[Tile]] = {}
        self.base = self._intern((), self._backend.identity())
        self._canonical: dict[int, CrossingWord] = {self.base.index: ()}
        self._frontier: list[Tile] = [self.base]
        self._radius = 0

    def __len__(self):
        return len(self._tiles)

    def _intern(self, word, state) -> Tile:
        key = self._backend.key(state)
        bucket = self._buckets.setdefault(key, [])
        for t in bucket:
            if self._backend.exact or self._backend.equal(t.word, word):
                return t
        t = Tile(self, len(self._tiles), word, state)
        self._tiles.append(t)
        bucket.append(t)
        return t

    def step(self, tile: Tile, letter: int) -> Tile:
        """The tile reached from ``tile`` by the crossing ``letter``."""
        nb = tile._neighbors.get(letter)
        if nb is None:
            word = free_reduce(tile.word + (letter,))
            if len(word) > 4 * self.polygon.sides:
                word = self._backend.reduce(word) if not self._backend.exact else word
            nb = self._intern(word, self._backend.advance(tile.state, letter))
            tile._neighbors[letter] = nb
            nb._neighbors[-letter] = tile
        return nb

    def neighbor(self, tile: Tile, side: int) -> Tile:
        return self.step(tile, self.polygon.letter(side))

    def walk(self, tile: Tile, word: Sequence[int]) -> Tile:
        for x in self.polygon.check_word(word):
            nb = tile._neighbors.get(x)
            tile = nb if nb is not None else self.step(tile, x)
        return tile

    def tile(self, word: Sequence[int]) -> Tile:
        return self.walk(self.base, word)

    def lift_path(self, start: LiftedVertex, word: Sequence[int], head: Hashable | None = None) -> LiftedVertex:
        """Lifted endpoint after applying ``word``; the vertex becomes ``head`` if given."""
        tile = self.walk(start.tile, word)
        return LiftedVertex(tile, start.vertex if head is None else head)

    def canonical_word(self, tile: Tile) -> CrossingWord:
        """Shortlex-minimal word reaching ``tile``, found by breadth-first closure."""
        if tile.tessellation is not self:
            raise ValueError("tile belongs to a different tessellation")
        while tile.index not in self._canonical:
            self._grow()
        return self._canonical[tile.index]

    def _grow(self):
        nxt = []
        for t in self._frontier:
            w = self._canonical[t.index]
            for x in self.polygon.alphabet():
                nb = self.step(t, x)
                if nb.index not in self._canonical:
                    self._canonical[nb.index] = w + (x,)
                    nxt.append(nb)
        self._frontier = nxt
        self._radius += 1

    def ball(self, radius: int) -> list[Tile]:
        """Tiles at crossing distance <= radius, in shortlex order of their names."""
        while self._radius < radius:
            self._grow()
        tiles = [self._tiles[i] for i, w in self._canonical.items() if len(w) <= radius]
        return sorted(tiles, key=lambda t: _shortlex_key(self._canonical[t.index], self.polygon))

    def dump(self, radius: int) -> dict:
        """Adjacency list of the radius-``radius`` ball, tiles named canonically."""
        self.ball(radius + 1)
        tiles = []
        for t in self.ball(radius):
            tiles.append({
                "id": list(self.canonical_word(t)),
                "neighbors": {
                    str(s): list(self.canonical_word(self.neighbor(t, s)))
                    for s in range(1, self.polygon.sides + 1)
                },
            })
        return {"polygon_half_sides": self.polygon.half_sides, "relator": list(self.relator),
                "radius": radius, "tiles": tiles}

    def dumps(self, radius: int) -> str:
        return json.dumps(self.dump(radius), sort_keys=True)


def _shortlex_key(word, polygon):
    order = {x: i for i, x in enumerate(polygon.alphabet())}
    return (len(word), [order[x] for x in word])


@functools.lru_cache(maxsize=None)
def cover(polygon: Polygon) -> Tessellation:
    """Shared tessellation for a polygon."""
    return Tessellation(polygon)


def words_equal(w1: Sequence[int], w2: Sequence[int], polygon: Polygon) -> bool:
    """Whether two crossing words lift the base tile to the same tile."""
    t = cover(polygon)
    return t.tile(w1) is t.tile(w2)


def is_trivial(word: Sequence[int], polygon: Polygon) -> bool:
    return words_equal(word, (), polygon)
