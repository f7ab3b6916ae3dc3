"""Symbolic substitutions: 1D morphisms, constant-length grid rules, substitution matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .geometry import Patch, Polygon, Prototile, RigidMotion, Tile


class UnknownLetterError(KeyError):
    def __init__(self, letter, where: str = ""):
        self.letter = letter
        msg = f"unknown letter {letter}" + (f" in {where}" if where else "")
        super().__init__(msg)

    def __str__(self) -> str:
        return self.args[0]


@dataclass(frozen=True)
class Alphabet:
    letters: tuple[str, ...]

    def __post_init__(self):
        letters = tuple(str(a) for a in self.letters)
        if not letters:
            raise ValueError("alphabet is empty")
        if len(set(letters)) != len(letters):
            raise ValueError("alphabet has duplicate letters")
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(letters)})

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __contains__(self, a) -> bool:
        return a in self._index

    def index(self, a: str) -> int:
        """Zero-based position of ``a``."""
        try:
            return self._index[a]
        except KeyError:
            raise UnknownLetterError(a) from None

    def encode(self, word: Iterable[str]) -> list[int]:
        return [self.index(a) for a in word]

    def decode(self, codes: Iterable[int]) -> tuple[str, ...]:
        return tuple(self.letters[i] for i in codes)


@dataclass(frozen=True)
class SubstitutionMatrix:
    """``rows[i][j]`` = number of type-i tiles in the image of type j."""

    rows: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        m = len(rows)
        if m == 0 or any(len(r) != m for r in rows):
            raise ValueError("substitution matrix must be square and non-empty")
        if any(x < 0 for r in rows for x in r):
            raise ValueError("substitution matrix has a negative entry")
        object.__setattr__(self, "rows", rows)
        labels = tuple(self.labels) or tuple(str(i + 1) for i in range(m))
        if len(labels) != m:
            raise ValueError("label count does not match matrix size")
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        if isinstance(other, SubstitutionMatrix):
            return self.rows == other.rows
        return self.rows == tuple(tuple(r) for r in other)

    def __hash__(self) -> int:
        return hash(self.rows)

    def to_numpy(self, dtype=float) -> np.ndarray:
        return np.array(self.rows, dtype=dtype)

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def apply(self, v: Sequence[int]) -> list[int]:
        """Exact product M v."""
        return [sum(a * b for a, b in zip(r, v)) for r in self.rows]

    def __matmul__(self, other: SubstitutionMatrix) -> SubstitutionMatrix:
        cols = list(zip(*other.rows))
        rows = tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows)
        return SubstitutionMatrix(rows, self.labels)

    def power(self, n: int) -> SubstitutionMatrix:
        out = SubstitutionMatrix.identity(self.size, self.labels)
        base = self
        while n:
            if n & 1:
                out = out @ base
            base = base @ base
            n >>= 1
        return out

    @classmethod
    def identity(cls, m: int, labels=()) -> SubstitutionMatrix:
        return cls(tuple(tuple(int(i == j) for j in range(m)) for i in range(m)), labels)

    def format(self) -> str:
        return " / ".join(" ".join(str(x) for x in r) for r in self.rows)

    def __str__(self) -> str:
        return self.format()


def _count_matrix(labels: Sequence[str], images: Sequence[Iterable[int]]) -> SubstitutionMatrix:
    m = len(labels)
    cols = []
    for img in images:
        col = [0] * m
        for i in img:
            col[i] += 1
        cols.append(col)
    return SubstitutionMatrix(tuple(tuple(cols[j][i] for j in range(m)) for i in range(m)), tuple(labels))


@dataclass(frozen=True, eq=False)
class SymbolicRule1D:
    """A map letter -> non-empty word, applied to words by concatenation."""

    alphabet: Alphabet
    images: Mapping[str, tuple[str, ...]]
    name: str = ""
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        imgs = {}
        for a, w in self.images.items():
            if a not in self.alphabet:
                raise UnknownLetterError(a, "rule")
            w = tuple(w)
            if not w:
                raise ValueError(f"image of {a} is empty")
            for b in w:
                if b not in self.alphabet:
                    raise UnknownLetterError(b, f"image of {a}")
            imgs[a] = w
        missing = [a for a in self.alphabet if a not in imgs]
        if missing:
            raise ValueError(f"letters without image: {' '.join(missing)}")
        object.__setattr__(self, "images", {a: imgs[a] for a in self.alphabet})
        object.__setattr__(self, "_codes", [self.alphabet.encode(imgs[a]) for a in self.alphabet])

    @classmethod
    def from_strings(cls, images: Mapping[str, str], name: str = "") -> SymbolicRule1D:
        """Single-character letters, e.g. ``{"a": "ab", "b": "a"}``."""
        return cls(Alphabet(tuple(images)), {a: tuple(w) for a, w in images.items()}, name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolicRule1D):
            return NotImplemented
        return self.alphabet == other.alphabet and self.images == other.images and self.name == other.name

    def __hash__(self) -> int:
        return hash((self.alphabet, tuple(self.images.items()), self.name))

    def apply(self, w: Iterable[str]) -> tuple[str, ...]:
        out: list[str] = []
        for a in w:
            if a not in self.alphabet:
                raise UnknownLetterError(a)
            out.extend(self.images[a])
        return tuple(out)

    def _block_codes(self, i: int, n: int) -> tuple[int, ...]:
        key = (i, n)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if n == 0:
            out = (i,)
        else:
            parts = [self._block_codes(j, n - 1) for j in self._codes[i]]
            out = tuple(x for p in parts for x in p)
        self._memo[key] = out
        return out

    def level_block(self, letter: str, n: int) -> tuple[str, ...]:
        if n < 0:
            raise ValueError("level must be >= 0")
        return self.alphabet.decode(self._block_codes(self.alphabet.index(letter), n))

    def block_lengths(self, n: int) -> dict[str, int]:
        """Exact lengths of all level-n blocks, via the matrix (no word expansion)."""
        v = [1] * len(self.alphabet)
        for _ in range(n):
            # |sigma^k(a)| = sum of |sigma^(k-1)(b)| over the letters b of sigma(a)
            v = [sum(v[c] for c in codes) for codes in self._codes]
        return dict(zip(self.alphabet, v))

    def substitution_matrix(self) -> SubstitutionMatrix:
        return _count_matrix(self.alphabet.letters, self._codes)


def apply(rule: SymbolicRule1D, w: Iterable[str]) -> tuple[str, ...]:
    return rule.apply(w)


def level_block(rule: SymbolicRule1D, letter: str, n: int) -> tuple[str, ...]:
    return rule.level_block(letter, n)


@dataclass(frozen=True, eq=False)
class GridRule:
    """Constant-length 2D substitution: each letter becomes an n x n array (row 0 on top)."""

    alphabet: Alphabet
    expansion: int
    images: Mapping[str, tuple[tuple[str, ...], ...]]
    name: str = ""
    labels: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for a in self.labels:
            if a not in self.alphabet:
                raise UnknownLetterError(a, "labels")
        object.__setattr__(self, "labels", dict(self.labels))
        n = int(self.expansion)
        if n < 2:
            raise ValueError("grid expansion must be an integer >= 2")
        imgs = {}
        for a, arr in self.images.items():
            if a not in self.alphabet:
                raise UnknownLetterError(a, "grid rule")
            arr = tuple(tuple(row) for row in arr)
            if len(arr) != n or any(len(row) != n for row in arr):
                raise ValueError(f"image of {a} is not {n}x{n}")
            for row in arr:
                for b in row:
                    if b not in self.alphabet:
                        raise UnknownLetterError(b, f"image of {a}")
            imgs[a] = arr
        missing = [a for a in self.alphabet if a not in imgs]
        if missing:
            raise ValueError(f"letters without image: {' '.join(missing)}")
        object.__setattr__(self, "images", {a: imgs[a] for a in self.alphabet})

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridRule):
            return NotImplemented
        return (self.alphabet, self.expansion, self.images, self.name, self.labels) == (
            other.alphabet,
            other.expansion,
            other.images,
            other.name,
            other.labels,
        )

    def __hash__(self) -> int:
        return hash((self.alphabet, self.expansion, self.name))

    def level_block(self, letter: str, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("level must be >= 0")
        self.alphabet.index(letter)
        k = self.expansion
        lut = np.array(
            [[[self.alphabet.index(b) for b in row] for row in self.images[a]] for a in self.alphabet],
            dtype=np.int64,
        )
        block = np.array([[self.alphabet.index(letter)]], dtype=np.int64)
        for _ in range(n):
            # each cell becomes its k x k image
            sub = lut[block]  # (r, c, k, k)
            r, c = block.shape
            block = sub.transpose(0, 2, 1, 3).reshape(r * k, c * k)
        return block

    def letter_block(self, letter: str, n: int) -> list[list[str]]:
        return [[self.alphabet.letters[i] for i in row] for row in self.level_block(letter, n)]

    def substitution_matrix(self) -> SubstitutionMatrix:
        codes = [[self.alphabet.index(b) for row in self.images[a] for b in row] for a in self.alphabet]
        return _count_matrix(self.alphabet.letters, codes)


def grid_level_block(rule: GridRule, letter: str, n: int) -> np.ndarray:
    """Array of alphabet indices of side ``expansion**n``; row 0 is the top row."""
    return rule.level_block(letter, n)


def grid_patch(rule: GridRule, letter: str, n: int) -> Patch:
    """Unit-square tiles for a level-n grid block; row 0 is drawn on top."""
    protos = tuple(Prototile(a, Polygon.rectangle(0, 0, 1, 1), rule.labels.get(a, "")) for a in rule.alphabet)
    block = rule.level_block(letter, n)
    side = block.shape[0]
    tiles = []
    for r in range(side):
        for c in range(side):
            tiles.append(Tile(protos[block[r, c]], RigidMotion.translate(c, side - 1 - r)))
    return Patch(tuple(tiles), protos)


def substitution_matrix(rule) -> SubstitutionMatrix:
    """Substitution matrix of any rule kind (symbolic, grid, geometric, combinatorial)."""
    try:
        method = rule.substitution_matrix
    except AttributeError:
        raise TypeError(f"no substitution matrix for {type(rule).__name__}") from None
    return method()


def letter_counts(alphabet: Alphabet, w: Iterable[str]) -> list[int]:
    v = [0] * len(alphabet)
    for a in w:
        v[alphabet.index(a)] += 1
    return v


def product_alphabet(h: Alphabet, v: Alphabet) -> Alphabet:
    """Row-major pair alphabet: (a,a), (a,b), (b,a), (b,b) for {a, b}."""
    return Alphabet(tuple(f"({x},{y})" for x in h for y in v))


FIBONACCI = SymbolicRule1D.from_strings({"a": "ab", "b": "a"}, "fibonacci")
ABB_BAB = SymbolicRule1D.from_strings({"a": "abb", "b": "bab"}, "abb_bab")
NONPISOT = SymbolicRule1D.from_strings({"a": "abbb", "b": "a"}, "nonpisot")
CHACON = SymbolicRule1D.from_strings({"a": "aaba", "b": "b"}, "chacon")

SIERPINSKI = GridRule(
    Alphabet(("1", "2")),
    3,
    {
        "1": (("1", "1", "1"), ("1", "1", "1"), ("1", "1", "1")),
        "2": (("2", "2", "2"), ("2", "1", "2"), ("2", "2", "2")),
    },
    "sierpinski",
    {"1": "white", "2": "blue"},
)
