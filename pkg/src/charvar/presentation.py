"""Finitely presented groups: words, a small presentation grammar, and
evaluation of words in matrix images.

Presentation text looks like ``<a,b,c | [a,b], a^2*b^-3>``: generator
names, a bar, then a comma-separated relator list.  ``*`` concatenates,
``^`` takes an integer exponent, and ``[x,y]`` is sugar for the
commutator x*y*x^-1*y^-1.  Whitespace is insignificant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidParams,
    ParseError,
    SingularMatrix,
    UnknownGenerator,
)

MAX_EXPONENT = 10**6

Letter = tuple[int, int]  # (generator index, nonzero exponent)


@dataclass(frozen=True)
class Word:
    """Word in abstract group generators.

    Letters are (generator index, exponent) pairs with nonzero exponents
    bounded by ``MAX_EXPONENT``.  Construction drops zero-exponent
    letters but performs no other simplification; use :func:`free_reduce`
    for the canonical form.
    """

    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        cleaned = []
        for gen, exp in self.letters:
            if not isinstance(gen, int) or not isinstance(exp, int):
                raise InvalidParams(f"letter ({gen!r}, {exp!r}) must be a pair of ints")
            if gen < 0:
                raise InvalidParams(f"generator index {gen} is negative")
            if abs(exp) > MAX_EXPONENT:
                raise InvalidParams(
                    f"exponent {exp} exceeds the supported bound {MAX_EXPONENT}"
                )
            if exp != 0:
                cleaned.append((gen, exp))
        object.__setattr__(self, "letters", tuple(cleaned))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, n: int) -> "Word":
        if n == 0:
            return Word()
        base = self if n > 0 else self.inverse()
        return Word(base.letters * abs(n))

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    @property
    def is_reduced(self) -> bool:
        return all(a[0] != b[0] for a, b in zip(self.letters, self.letters[1:]))

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=-1)

    def __len__(self) -> int:
        return len(self.letters)


def free_reduce(word: Word) -> Word:
    """Merge adjacent letters on the same generator and drop cancellations.

    Idempotent; the result is the canonical freely reduced form.
    """
    stack: list[list[int]] = []
    for gen, exp in word.letters:
        if stack and stack[-1][0] == gen:
            stack[-1][1] += exp
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([gen, exp])
    return Word(tuple((g, e) for g, e in stack))


def commutator(x: Word, y: Word) -> Word:
    return x * y * x.inverse() * y.inverse()


def generator(index: int, exp: int = 1) -> Word:
    return Word(((index, exp),))


# ---------------------------------------------------------------------------
# Families


class Family(str, Enum):
    FREE = "free"
    ABELIAN = "abelian"
    RAAG = "raag"
    STAR_RAAG = "star_raag"
    FREE_PRODUCT = "free_product"
    DIRECT_WITH_FINITE = "direct_with_finite"
    TORUS_KNOT = "torus_knot"
    CUSTOM = "custom"


@dataclass(frozen=True)
class GraphSpec:
    """Simple undirected graph on vertices 0..vertex_count-1."""

    vertex_count: int
    edges: frozenset[frozenset[int]] = frozenset()

    def __post_init__(self):
        norm = set()
        for edge in self.edges:
            pair = frozenset(edge)
            if len(pair) != 2:
                raise InvalidParams(f"edge {set(edge)} is not a 2-set")
            if any(v < 0 or v >= self.vertex_count for v in pair):
                raise InvalidParams(f"edge {set(edge)} leaves the vertex range")
            norm.add(pair)
        object.__setattr__(self, "edges", frozenset(norm))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.edges)


def _as_commutator(word: Word) -> tuple[int, int] | None:
    """Return (i, j) if word is exactly [a_i, a_j], else None."""
    ls = word.letters
    if len(ls) != 4:
        return None
    (g0, e0), (g1, e1), (g2, e2), (g3, e3) = ls
    if (e0, e1, e2, e3) == (1, 1, -1, -1) and g0 == g2 and g1 == g3 and g0 != g1:
        return (g0, g1)
    return None


@dataclass(frozen=True)
class GroupPresentation:
    """Finite presentation with an optional family annotation.

    ``fixed`` lists the distinguished generator indices whose images stay
    pinned under the deformation retractions: the star centre for
    star-shaped right-angled Artin groups, the finite-factor block for
    direct products with a finite group.
    """

    generator_names: tuple[str, ...]
    relators: tuple[Word, ...] = ()
    family: Family = Family.CUSTOM
    graph: GraphSpec | None = None
    fixed: tuple[int, ...] = ()

    def __post_init__(self):
        names = tuple(self.generator_names)
        if len(names) == 0:
            raise InvalidParams("a presentation needs at least one generator")
        if len(set(names)) != len(names):
            raise InvalidParams("generator names must be distinct")
        for name in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
                raise InvalidParams(f"generator name {name!r} is not an identifier")
        object.__setattr__(self, "generator_names", names)
        rels = tuple(free_reduce(r) for r in self.relators)
        object.__setattr__(self, "relators", rels)
        ngens = len(names)
        for rel in rels:
            if rel.max_generator() >= ngens:
                raise UnknownGenerator(
                    f"relator uses generator index {rel.max_generator()} "
                    f"but only {ngens} generators are declared"
                )
        if any(i < 0 or i >= ngens for i in self.fixed):
            raise InvalidParams("fixed generator index out of range")
        if self.family in (Family.RAAG, Family.STAR_RAAG, Family.ABELIAN):
            if self.graph is None:
                raise InvalidParams(f"family {self.family.value} requires a graph")
            if self.graph.vertex_count != ngens:
                raise InvalidParams("graph vertex count must equal generator count")
            seen = set()
            for rel in rels:
                pair = _as_commutator(rel)
                if pair is None:
                    raise InvalidParams(
                        f"family {self.family.value} allows commutator relators only"
                    )
                seen.add(frozenset(pair))
            if seen != set(self.graph.edges):
                raise InvalidParams("relators do not match the graph edge set")

    @property
    def rank(self) -> int:
        return len(self.generator_names)


# Builders.  Generator naming follows the written convention: a1..ar for
# plain families, a0 first for the star centre, a-block then b-block for
# direct products with a finite factor.


def free_group(rank: int) -> GroupPresentation:
    _check_rank(rank)
    return GroupPresentation(
        tuple(f"a{i + 1}" for i in range(rank)), (), family=Family.FREE
    )


def abelian_group(rank: int) -> GroupPresentation:
    _check_rank(rank)
    edges = frozenset(
        frozenset((i, j)) for i in range(rank) for j in range(i + 1, rank)
    )
    graph = GraphSpec(rank, edges)
    rels = tuple(
        commutator(generator(i), generator(j)) for i, j in graph.sorted_edges()
    )
    return GroupPresentation(
        tuple(f"a{i + 1}" for i in range(rank)),
        rels,
        family=Family.ABELIAN,
        graph=graph,
    )


def raag(graph: GraphSpec) -> GroupPresentation:
    """Right-angled Artin group of a simple graph: one generator per
    vertex, one commutator relator per edge."""
    _check_rank(graph.vertex_count)
    rels = tuple(
        commutator(generator(i), generator(j)) for i, j in graph.sorted_edges()
    )
    return GroupPresentation(
        tuple(f"a{i + 1}" for i in range(graph.vertex_count)),
        rels,
        family=Family.RAAG,
        graph=graph,
    )


def star_raag(leaf_count: int) -> GroupPresentation:
    """Star-shaped right-angled Artin group: a0 commutes with each of
    a1..a_r and the leaves satisfy no other relation."""
    if leaf_count < 1:
        raise InvalidParams("a star needs at least one leaf")
    _check_rank(leaf_count + 1)
    graph = GraphSpec(
        leaf_count + 1, frozenset(frozenset((0, i + 1)) for i in range(leaf_count))
    )
    rels = tuple(
        commutator(generator(0), generator(i + 1)) for i in range(leaf_count)
    )
    names = tuple(f"a{i}" for i in range(leaf_count + 1))
    return GroupPresentation(
        names, rels, family=Family.STAR_RAAG, graph=graph, fixed=(0,)
    )


def torus_knot_group(exponents: Sequence[int]) -> GroupPresentation:
    """Generalized torus-knot group: a_i^{n_i} = a_j^{n_j} for all i < j."""
    exps = tuple(int(n) for n in exponents)
    if len(exps) < 2:
        raise InvalidParams("need at least two exponents")
    if any(n < 1 or n > MAX_EXPONENT for n in exps):
        raise InvalidParams("exponents must lie in [1, 10^6]")
    rels = tuple(
        generator(i, exps[i]) * generator(j, -exps[j])
        for i in range(len(exps))
        for j in range(i + 1, len(exps))
    )
    return GroupPresentation(
        tuple(f"a{i + 1}" for i in range(len(exps))),
        rels,
        family=Family.TORUS_KNOT,
    )


def direct_with_finite(free_rank: int, finite: GroupPresentation) -> GroupPresentation:
    """F_r x F for a finitely presented (finite) group F: the a-block is
    free, the b-block carries F's relators, and every a commutes with
    every b."""
    _check_rank(free_rank)
    s = finite.rank
    names = tuple(f"a{i + 1}" for i in range(free_rank)) + tuple(
        f"b{j + 1}" for j in range(s)
    )
    rels = [
        commutator(generator(i), generator(free_rank + j))
        for i in range(free_rank)
        for j in range(s)
    ]
    for rel in finite.relators:
        rels.append(Word(tuple((g + free_rank, e) for g, e in rel.letters)))
    return GroupPresentation(
        names,
        tuple(rels),
        family=Family.DIRECT_WITH_FINITE,
        fixed=tuple(range(free_rank, free_rank + s)),
    )


def free_product(*parts: GroupPresentation) -> GroupPresentation:
    if len(parts) < 2:
        raise InvalidParams("a free product needs at least two factors")
    names: list[str] = []
    rels: list[Word] = []
    offset = 0
    for k, part in enumerate(parts):
        for name in part.generator_names:
            names.append(f"p{k + 1}_{name}")
        for rel in part.relators:
            rels.append(Word(tuple((g + offset, e) for g, e in rel.letters)))
        offset += part.rank
    return GroupPresentation(tuple(names), tuple(rels), family=Family.FREE_PRODUCT)


def _check_rank(rank: int):
    if not isinstance(rank, int) or rank < 1:
        raise InvalidParams(f"rank must be a positive int, got {rank!r}")
    if rank > 64:
        raise InvalidParams("rank above 64 is unsupported")


def build_family(tag: str | Family, **params) -> GroupPresentation:
    """String-keyed dispatcher over the named constructors (CLI entry)."""
    tag = Family(tag)
    if tag == Family.FREE:
        return free_group(params["rank"])
    if tag == Family.ABELIAN:
        return abelian_group(params["rank"])
    if tag == Family.RAAG:
        return raag(params["graph"])
    if tag == Family.STAR_RAAG:
        return star_raag(params["rank"])
    if tag == Family.TORUS_KNOT:
        return torus_knot_group(params["exponents"])
    if tag == Family.DIRECT_WITH_FINITE:
        return direct_with_finite(params["free_rank"], params["finite"])
    if tag == Family.FREE_PRODUCT:
        return free_product(*params["parts"])
    raise InvalidParams(f"no builder for family {tag.value!r}")


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>-?\d+)|(?P<sym>[<>|,*^\[\]]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "name" | "int" | one of the symbol characters | "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ParseError(f"unexpected character {text[at]!r}", at, "a token")
        if match.lastgroup == "name":
            tokens.append(_Token("name", match.group("name"), match.start("name")))
        elif match.lastgroup == "int":
            tokens.append(_Token("int", match.group("int"), match.start("int")))
        else:
            sym = match.group("sym")
            tokens.append(_Token(sym, sym, match.start("sym")))
        pos = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0
        self.names: dict[str, int] = {}

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"found {tok.text or 'end of input'!r}", tok.pos, what)
        return self.advance()

    def parse(self) -> GroupPresentation:
        self.expect("<", "'<'")
        names = [self.expect("name", "a generator name").text]
        while self.peek().kind == ",":
            self.advance()
            names.append(self.expect("name", "a generator name").text)
        for i, name in enumerate(names):
            if name in self.names:
                raise ParseError(f"generator {name!r} repeated", 0, "distinct names")
            self.names[name] = i
        self.expect("|", "'|'")
        relators = []
        if self.peek().kind not in (">",):
            relators.append(self.word())
            while self.peek().kind == ",":
                self.advance()
                relators.append(self.word())
        self.expect(">", "'>'")
        self.expect("end", "end of input")
        return GroupPresentation(tuple(names), tuple(relators))

    def word(self) -> Word:
        result = self.factor()
        while self.peek().kind == "*":
            self.advance()
            result = result * self.factor()
        return result

    def factor(self) -> Word:
        atom = self.atom()
        if self.peek().kind == "^":
            self.advance()
            tok = self.expect("int", "an integer exponent")
            exp = int(tok.text)
            if abs(exp) > MAX_EXPONENT:
                raise InvalidParams(
                    f"exponent {exp} exceeds the supported bound {MAX_EXPONENT}"
                )
            return atom**exp
        return atom

    def atom(self) -> Word:
        tok = self.peek()
        if tok.kind == "name":
            self.advance()
            if tok.text not in self.names:
                raise UnknownGenerator(f"generator {tok.text!r} is not declared")
            return generator(self.names[tok.text])
        if tok.kind == "[":
            self.advance()
            left = self.word()
            self.expect(",", "','")
            right = self.word()
            self.expect("]", "']'")
            return commutator(left, right)
        raise ParseError(
            f"found {tok.text or 'end of input'!r}",
            tok.pos,
            "a generator name or '['",
        )


def parse_presentation(text: str) -> GroupPresentation:
    """Parse presentation text into a :class:`GroupPresentation`.

    Relators come back freely reduced; the family tag is ``custom``
    because plain text carries no structural annotation.
    """
    return _Parser(text).parse()


def presentation_to_text(pres: GroupPresentation) -> str:
    """Render in the grammar (sugar-free); parses back to equal
    generator names and relators."""
    gens = ",".join(pres.generator_names)
    rels = ", ".join(word_to_text(rel, pres.generator_names) for rel in pres.relators)
    return f"<{gens} | {rels}>"


def word_to_text(word: Word, names: Sequence[str]) -> str:
    if not word.letters:
        raise InvalidParams("cannot render an empty word")
    parts = []
    for gen, exp in word.letters:
        parts.append(names[gen] if exp == 1 else f"{names[gen]}^{exp}")
    return "*".join(parts)


# ---------------------------------------------------------------------------
# Evaluation

_SINGULAR_TOL = 1e-12


def evaluate_word(word: Word, images: Sequence[np.ndarray]) -> np.ndarray:
    """Left-to-right product of generator images, inverting on negative
    exponents.  ``images[i]`` is the matrix assigned to generator i.
    """
    if not images:
        raise DimensionMismatch("no generator images supplied")
    n = images[0].shape[0]
    for img in images:
        if img.shape != (n, n):
            raise DimensionMismatch(
                f"images must all be {n}x{n}, got {img.shape}"
            )
    if word.max_generator() >= len(images):
        raise UnknownGenerator(
            f"word uses generator {word.max_generator()} but only "
            f"{len(images)} images are given"
        )
    result = np.eye(n, dtype=complex)
    for gen, exp in word.letters:
        base = np.asarray(images[gen], dtype=complex)
        if exp < 0 and abs(np.linalg.det(base)) < _SINGULAR_TOL:
            raise SingularMatrix(
                f"image of generator {gen} is singular, cannot invert"
            )
        result = result @ np.linalg.matrix_power(base, exp)
    return result
