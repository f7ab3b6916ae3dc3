"""Rule definition language: tokenizer, recursive-descent parser and pretty-printer.

A document is a sequence of blocks::

    symbolic fib { a -> a b; b -> a; }
    grid carpet expansion=3 { 1 -> 1 1 1 / 1 1 1 / 1 1 1; 2 -> 2 2 2 / 2 1 2 / 2 2 2; label 2 "blue"; }
    geometric half { expansion=[[2,0],[0,2]]; prototile P polygon (0,0) (1,0) (0,1); child P <- P t=(0,0); }
    dpv fibdpv from fib x fib { arrange (a,a): (b,b) at (0,0), (a,b) at (W(b),0); }
    recurrence rauzy { base: 1 -> 1 2; 2 -> 3; 3 -> 1; seeds v0=(0,0) v1=(0,1) v2=(-1,0); rec v[n]=v[n-3]-v[n-2]; }

``#`` starts a comment.  Reals accept integer, decimal and exponent
literals, ``phi``, ``sqrt(k)`` and + - * / with parentheses.  Parsing never
raises: every problem becomes a diagnostic with line and column.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .geometry import GeometryError, LinearMap, Polygon, Prototile, RigidMotion
from .symbolic import Alphabet, GridRule, SymbolicRule1D, UnknownLetterError

GOLDEN = (1 + math.sqrt(5)) / 2
SYMBOLS = ("->", "<-", "{", "}", "(", ")", "[", "]", ";", ",", ":", "=", "/", "*", "+", "-")
BLOCK_KINDS = ("symbolic", "grid", "geometric", "dpv", "recurrence")


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


@dataclass
class RuleDocument:
    source: str
    rule: object | None = None
    rules: dict = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.rule is not None and not any(d.severity == "error" for d in self.diagnostics)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, number, string, sym, eof
    text: str
    line: int
    col: int


class ParseError(Exception):
    def __init__(self, tok: Token, message: str):
        super().__init__(message)
        self.line = tok.line
        self.col = tok.col
        self.message = message


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    toks: list[Token] = []
    diags: list[Diagnostic] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if ch.isascii() and (ch.isalpha() or ch == "_"):
            j = i + 1
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("ident", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch.isascii() and (ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isascii() and text[i + 1].isdigit())):
            j = i
            while j < n and text[j].isascii() and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isascii() and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isascii() and text[k].isdigit():
                    while k < n and text[k].isascii() and text[k].isdigit():
                        k += 1
                    j = k
            toks.append(Token("number", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"' and text[j] != "\n":
                j += 2 if text[j] == "\\" else 1
            if j >= n or text[j] != '"':
                diags.append(Diagnostic(line, start_col, "unterminated string"))
                col += j - i
                i = j
                continue
            raw = text[i : j + 1]
            try:
                value = json.loads(raw)
            except ValueError:
                diags.append(Diagnostic(line, start_col, "invalid escape in string"))
                value = ""
            toks.append(Token("string", value, line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        two = text[i : i + 2]
        if two in ("->", "<-"):
            toks.append(Token("sym", two, line, start_col))
            i, col = i + 2, col + 2
            continue
        if ch in "{}()[];,:=/*+-":
            toks.append(Token("sym", ch, line, start_col))
            i, col = i + 1, col + 1
            continue
        diags.append(Diagnostic(line, start_col, f"unexpected character {ch!r}"))
        i, col = i + 1, col + 1
    toks.append(Token("eof", "", line, col))
    return toks, diags


def _builtin_symbolic(name: str):
    from .catalog import SYMBOLIC

    return SYMBOLIC.get(name)


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks, self.diags = tokenize(text)
        self.pos = 0
        self.rules: dict[str, object] = {}
        self.last = None

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("sym", "ident")

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise ParseError(self.tok, f"expected {text!r}, found {self._desc(self.tok)}")
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    @staticmethod
    def _desc(t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.text)

    def ident(self, what: str = "name") -> Token:
        if self.tok.kind != "ident":
            raise ParseError(self.tok, f"expected {what}, found {self._desc(self.tok)}")
        return self.advance()

    def letter(self) -> Token:
        if self.tok.kind == "ident" or (self.tok.kind == "number" and self.tok.text.isdigit()):
            return self.advance()
        raise ParseError(self.tok, f"expected a letter, found {self._desc(self.tok)}")

    def is_letter(self) -> bool:
        return self.tok.kind == "ident" or (self.tok.kind == "number" and self.tok.text.isdigit())

    def integer(self) -> int:
        neg = self.accept("-")
        t = self.tok
        if t.kind != "number" or not t.text.isdigit():
            raise ParseError(t, f"expected an integer, found {self._desc(t)}")
        self.advance()
        if len(t.text) > 30:
            raise ParseError(t, "integer too large")
        return -int(t.text) if neg else int(t.text)

    def error(self, tok: Token, message: str) -> None:
        self.diags.append(Diagnostic(tok.line, tok.col, message))

    def skip_block(self) -> None:
        """Recover by skipping past the closing brace of the current block."""
        depth = 0
        while self.tok.kind != "eof":
            t = self.advance()
            if t.text == "{" and t.kind == "sym":
                depth += 1
            elif t.text == "}" and t.kind == "sym":
                if depth <= 1:
                    return
                depth -= 1

    # reals
    def real(self) -> float:
        start = self.tok
        v = self.expr(0)
        if not math.isfinite(v):
            raise ParseError(start, "number is not finite")
        return v

    def expr(self, depth: int) -> float:
        if depth > 200:
            raise ParseError(self.tok, "expression nested too deeply")
        v = self.term(depth)
        while self.at("+") or self.at("-"):
            op = self.advance().text
            w = self.term(depth)
            v = v + w if op == "+" else v - w
        return v

    def term(self, depth: int) -> float:
        v = self.unary(depth)
        while self.at("*") or self.at("/"):
            op = self.advance()
            w = self.unary(depth)
            if op.text == "*":
                v = v * w
            else:
                if w == 0:
                    raise ParseError(op, "division by zero")
                v = v / w
        return v

    def unary(self, depth: int) -> float:
        if self.accept("-"):
            return -self.unary(depth + 1)
        if self.accept("+"):
            return self.unary(depth + 1)
        return self.atom(depth)

    def atom(self, depth: int) -> float:
        t = self.tok
        if t.kind == "number":
            self.advance()
            try:
                v = float(t.text)
            except ValueError:
                raise ParseError(t, f"bad number {t.text!r}") from None
            if not math.isfinite(v):
                raise ParseError(t, "number is not finite")
            return v
        if t.kind == "ident" and t.text == "phi":
            self.advance()
            return GOLDEN
        if t.kind == "ident" and t.text == "sqrt":
            self.advance()
            self.expect("(")
            v = self.expr(depth + 1)
            self.expect(")")
            if v < 0:
                raise ParseError(t, "sqrt of a negative number")
            return math.sqrt(v)
        if self.accept("("):
            v = self.expr(depth + 1)
            self.expect(")")
            return v
        raise ParseError(t, f"expected a number, found {self._desc(t)}")

    def point(self) -> tuple[float, float]:
        self.expect("(")
        x = self.real()
        self.expect(",")
        y = self.real()
        self.expect(")")
        return x, y

    def matrix(self) -> tuple[float, float, float, float]:
        self.expect("[")
        self.expect("[")
        a = self.real()
        self.expect(",")
        b = self.real()
        self.expect("]")
        self.expect(",")
        self.expect("[")
        c = self.real()
        self.expect(",")
        d = self.real()
        self.expect("]")
        self.expect("]")
        return a, b, c, d

    # document
    def parse(self) -> RuleDocument:
        while self.tok.kind != "eof":
            t = self.tok
            if t.kind == "ident" and t.text in BLOCK_KINDS:
                try:
                    self.block()
                except ParseError as err:
                    self.diags.append(Diagnostic(err.line, err.col, err.message))
                    self.skip_block()
            else:
                self.error(t, f"expected one of {', '.join(BLOCK_KINDS)}, found {self._desc(t)}")
                self.advance()
                while self.tok.kind != "eof" and not (self.tok.kind == "ident" and self.tok.text in BLOCK_KINDS):
                    self.advance()
        doc = RuleDocument(self.text, None, dict(self.rules), sorted(self.diags, key=lambda d: (d.line, d.column)))
        if not self.rules and not doc.diagnostics:
            doc.diagnostics.append(Diagnostic(1, 1, "no rule defined"))
        if not any(d.severity == "error" for d in doc.diagnostics):
            doc.rule = self.last
        return doc

    def block(self) -> None:
        kind = self.advance()
        name = self.ident("block name")
        handler = getattr(self, f"_{kind.text}")
        rule = handler(kind, name)
        if rule is not None:
            if name.text in self.rules:
                self.error(name, f"duplicate rule name {name.text}")
            self.rules[name.text] = rule
            self.last = rule

    def _images(self, stop: tuple[str, ...]) -> list[tuple[Token, list[Token]]]:
        out = []
        while not (self.tok.kind in ("ident", "sym") and self.tok.text in stop) and self.tok.kind != "eof":
            lhs = self.letter()
            self.expect("->")
            rhs = []
            while self.is_letter():
                rhs.append(self.advance())
            if not rhs:
                raise ParseError(self.tok, f"empty image for {lhs.text}")
            self.expect(";")
            out.append((lhs, rhs))
        return out

    def _check_letters(self, rules: list[tuple[Token, list[Token]]]) -> list[str] | None:
        letters: list[str] = []
        ok = True
        for lhs, _ in rules:
            if lhs.text in letters:
                self.error(lhs, f"letter {lhs.text} defined twice")
                ok = False
            letters.append(lhs.text)
        for _, rhs in rules:
            for t in rhs:
                if t.text not in letters and t.text != "/":
                    self.error(t, f"unknown letter {t.text}")
                    ok = False
        if not letters:
            self.error(self.tok, "rule has no letters")
            ok = False
        return letters if ok else None

    def _symbolic(self, kind: Token, name: Token):
        self.expect("{")
        rules = self._images(("}",))
        self.expect("}")
        letters = self._check_letters(rules)
        if letters is None:
            return None
        return SymbolicRule1D(Alphabet(tuple(letters)), {l.text: tuple(t.text for t in r) for l, r in rules}, name.text)

    def _grid(self, kind: Token, name: Token):
        self.expect("expansion")
        self.expect("=")
        k_tok = self.tok
        k = self.integer()
        self.expect("{")
        rules: list[tuple[Token, list[list[Token]]]] = []
        labels: list[tuple[Token, str]] = []
        while not self.at("}") and self.tok.kind != "eof":
            if self.at("label") and self.peek().kind in ("ident", "number") and self.peek(2).kind == "string":
                self.advance()
                letter = self.letter()
                labels.append((letter, self.advance().text))
                self.expect(";")
                continue
            lhs = self.letter()
            self.expect("->")
            rows: list[list[Token]] = [[]]
            while self.is_letter() or self.at("/"):
                t = self.advance()
                if t.text == "/" and t.kind == "sym":
                    rows.append([])
                else:
                    rows[-1].append(t)
            self.expect(";")
            rules.append((lhs, rows))
        self.expect("}")
        letters = self._check_letters([(l, [t for row in rows for t in row]) for l, rows in rules])
        if letters is None:
            return None
        if k < 2:
            self.error(k_tok, "grid expansion must be an integer >= 2")
            return None
        bad = False
        for lhs, rows in rules:
            if len(rows) != k or any(len(r) != k for r in rows):
                self.error(lhs, f"image of {lhs.text} is not {k}x{k}")
                bad = True
        for letter, _ in labels:
            if letter.text not in letters:
                self.error(letter, f"unknown letter {letter.text}")
                bad = True
        if bad:
            return None
        images = {l.text: tuple(tuple(t.text for t in row) for row in rows) for l, rows in rules}
        return GridRule(Alphabet(tuple(letters)), k, images, name.text, {l.text: s for l, s in labels})

    def _geometric(self, kind: Token, name: Token):
        from .georule import GeometricRule

        self.expect("{")
        expansion = None
        equivalence = "translation"
        dimension = 2
        protos: list[tuple[Token, str, list[tuple[float, float]]]] = []
        kids: list[tuple[Token, Token, tuple, tuple]] = []
        while not self.at("}") and self.tok.kind != "eof":
            t = self.ident("statement")
            if t.text == "expansion":
                self.expect("=")
                expansion = (t, self.matrix())
            elif t.text == "equivalence":
                self.expect("=")
                mode = self.ident("equivalence mode")
                if mode.text not in ("translation", "isometry"):
                    raise ParseError(mode, f"unknown equivalence mode {mode.text}")
                equivalence = mode.text
            elif t.text == "dimension":
                self.expect("=")
                dt = self.tok
                dimension = self.integer()
                if dimension not in (1, 2):
                    raise ParseError(dt, "dimension must be 1 or 2")
            elif t.text == "prototile":
                pid = self.letter()
                label = ""
                if self.accept("label"):
                    if self.tok.kind != "string":
                        raise ParseError(self.tok, "expected a quoted label")
                    label = self.advance().text
                self.expect("polygon")
                pts = []
                while self.at("("):
                    pts.append(self.point())
                protos.append((pid, label, pts))
            elif t.text == "child":
                parent = self.letter()
                self.expect("<-")
                child = self.letter()
                lin = (1.0, 0.0, 0.0, 1.0)
                tr = (0.0, 0.0)
                if self.accept("linear"):
                    self.expect("=")
                    lin = self.matrix()
                if self.accept("t"):
                    self.expect("=")
                    tr = self.point()
                kids.append((parent, child, lin, tr))
            else:
                raise ParseError(t, f"unknown statement {t.text!r}")
            self.expect(";")
        self.expect("}")
        if expansion is None:
            self.error(name, "missing expansion")
            return None
        built = []
        ok = True
        for pid, label, pts in protos:
            try:
                built.append(Prototile(pid.text, Polygon(tuple(pts)), label))
            except (GeometryError, ValueError) as err:
                self.error(pid, f"prototile {pid.text}: {err}")
                ok = False
        ids = [p.id for p in built]
        children: dict[str, list] = {p: [] for p in ids}
        for parent, child, lin, tr in kids:
            for tok in (parent, child):
                if tok.text not in ids and ok:
                    self.error(tok, f"unknown prototile {tok.text}")
                    ok = False
            try:
                motion = RigidMotion(LinearMap(*lin), tr)
            except (GeometryError, ValueError) as err:
                self.error(parent, f"child placement: {err}")
                ok = False
                continue
            if parent.text in children:
                children[parent.text].append((child.text, motion))
        if not ok:
            return None
        try:
            return GeometricRule(name.text, tuple(built), LinearMap(*expansion[1]), children, equivalence, dimension)
        except (GeometryError, ValueError, KeyError, ZeroDivisionError, np_error()) as err:
            self.error(name, str(err))
            return None

    def _pair(self) -> tuple[Token, Token]:
        self.expect("(")
        x = self.letter()
        self.expect(",")
        y = self.letter()
        self.expect(")")
        return x, y

    def _offset(self):
        from .combrule import Offset

        terms: dict[tuple[str, str], int] = {}
        if self.tok.kind == "number" and self.tok.text == "0" and self.peek().text in (",", ")"):
            self.advance()
            return Offset(), []
        refs = []
        first = True
        while True:
            sign = 1
            if self.at("+") or self.at("-"):
                sign = -1 if self.advance().text == "-" else 1
            elif not first:
                break
            coef = 1
            if self.tok.kind == "number":
                ct = self.tok
                coef = self.integer()
                if coef == 0:
                    raise ParseError(ct, "zero coefficient")
                self.accept("*")
            kt = self.tok
            if not (kt.kind == "ident" and kt.text in ("W", "H")):
                raise ParseError(kt, f"expected W(letter) or H(letter), found {self._desc(kt)}")
            self.advance()
            self.expect("(")
            lt = self.letter()
            self.expect(")")
            refs.append((kt.text, lt))
            key = (kt.text, lt.text)
            terms[key] = terms.get(key, 0) + sign * coef
            first = False
        return Offset(tuple((k, l, c) for (k, l), c in sorted(terms.items()) if c)), refs

    def _dpv(self, kind: Token, name: Token):
        from .combrule import DPVRule

        self.expect("from")
        a = self.ident("horizontal rule")
        if not (self.tok.kind == "ident" and self.tok.text == "x"):
            raise ParseError(self.tok, f"expected 'x', found {self._desc(self.tok)}")
        self.advance()
        b = self.ident("vertical rule")
        self.expect("{")
        rescaled = False
        arrangement: dict[tuple[str, str], list] = {}
        where: dict[tuple[str, str], Token] = {}
        refs: list[tuple[str, Token]] = []
        letters_used: list[tuple[Token, Token]] = []
        while not self.at("}") and self.tok.kind != "eof":
            t = self.ident("statement")
            if t.text == "rescaled":
                rescaled = True
                self.expect(";")
                continue
            if t.text != "arrange":
                raise ParseError(t, f"unknown statement {t.text!r}")
            x, y = self._pair()
            self.expect(":")
            key = (x.text, y.text)
            letters_used.append((x, y))
            where.setdefault(key, x)
            items = arrangement.setdefault(key, [])
            while True:
                cx, cy = self._pair()
                letters_used.append((cx, cy))
                self.expect("at")
                self.expect("(")
                ox, rx = self._offset()
                self.expect(",")
                oy, ry = self._offset()
                self.expect(")")
                refs += [(k, tok) for k, tok in rx + ry]
                items.append(((cx.text, cy.text), (ox, oy)))
                if self.accept(","):
                    continue
                self.expect(";")
                break
        self.expect("}")
        factors = []
        for tok in (a, b):
            rule = self.rules.get(tok.text)
            if rule is None:
                rule = _builtin_symbolic(tok.text)
            if not isinstance(rule, SymbolicRule1D):
                self.error(tok, f"unknown symbolic rule {tok.text}")
                return None
            factors.append(rule)
        h, v = factors
        ok = True
        for x, y in letters_used:
            if x.text not in h.alphabet:
                self.error(x, f"unknown letter {x.text}")
                ok = False
            if y.text not in v.alphabet:
                self.error(y, f"unknown letter {y.text}")
                ok = False
        for k, tok in refs:
            if tok.text not in (h.alphabet if k == "W" else v.alphabet):
                self.error(tok, f"unknown letter {tok.text}")
                ok = False
        if not ok:
            return None
        from .combrule import plain_arrangement

        for key, items in arrangement.items():
            want = sorted(c for c, _ in plain_arrangement(h, v, key))
            if sorted(c for c, _ in items) != want:
                self.error(where[key], f"arrangement for ({key[0]},{key[1]}) does not match the direct-product children")
                ok = False
        if not ok:
            return None
        try:
            return DPVRule(name.text, h, v, arrangement, rescaled)
        except Exception as err:  # packing failures surface as diagnostics
            self.error(name, f"{type(err).__name__}: {err}")
            return None

    def _recurrence(self, kind: Token, name: Token):
        from .combrule import RecurrenceRule

        self.expect("{")
        self.expect("base")
        self.expect(":")
        rules = self._images(("seeds",))
        self.expect("seeds")
        seeds: dict[int, tuple[int, int]] = {}
        while self.tok.kind == "ident" and self.tok.text.startswith("v") and self.tok.text[1:].isdigit():
            st = self.advance()
            idx = int(st.text[1:]) if len(st.text) < 12 else -1
            self.expect("=")
            self.expect("(")
            x = self.integer()
            self.expect(",")
            y = self.integer()
            self.expect(")")
            if idx in seeds:
                raise ParseError(st, f"seed {st.text} given twice")
            seeds[idx] = (x, y)
        self.expect(";")
        self.expect("rec")
        self.expect("v")
        self.expect("[")
        self.expect("n")
        self.expect("]")
        self.expect("=")
        rec: dict[int, int] = {}
        first = True
        while True:
            sign = 1
            if self.at("+") or self.at("-"):
                sign = -1 if self.advance().text == "-" else 1
            elif not first:
                break
            coef = 1
            if self.tok.kind == "number":
                coef = self.integer()
                self.expect("*")
            self.expect("v")
            self.expect("[")
            self.expect("n")
            self.expect("-")
            lt = self.tok
            lag = self.integer()
            if lag < 1:
                raise ParseError(lt, "lag must be positive")
            self.expect("]")
            rec[lag] = rec.get(lag, 0) + sign * coef
            first = False
        self.expect(";")
        self.expect("}")
        letters = self._check_letters(rules)
        if letters is None:
            return None
        if sorted(seeds) != list(range(len(seeds))):
            self.error(name, "seeds must be v0, v1, ... without gaps")
            return None
        rec = {k: c for k, c in rec.items() if c}
        if rec and max(rec) > len(seeds):
            self.error(name, f"recurrence reaches back {max(rec)} steps but only {len(seeds)} seeds are given")
            return None
        try:
            return RecurrenceRule(
                name.text,
                {l.text: tuple(t.text for t in r) for l, r in rules},
                [seeds[k] for k in range(len(seeds))],
                rec,
            )
        except Exception as err:
            self.error(name, f"{type(err).__name__}: {err}")
            return None


def np_error():
    import numpy as np

    return np.linalg.LinAlgError


def parse_rule(text) -> RuleDocument:
    """Parse a document; the last rule defined is ``doc.rule``.  Never raises."""
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("utf-8", errors="replace")
    try:
        return Parser(text).parse()
    except RecursionError:
        return RuleDocument(text, None, {}, [Diagnostic(1, 1, "input nested too deeply")])
    except Exception as err:  # last-resort guard; the fuzz suite asserts this path is never taken
        return RuleDocument(text, None, {}, [Diagnostic(1, 1, f"internal parser error: {type(err).__name__}: {err}")])


# printing --------------------------------------------------------------------


def _num(x: float) -> str:
    r = repr(float(x))
    return "0" if r == "-0.0" else r


def _matrix(m: LinearMap) -> str:
    return f"[[{_num(m.a)}, {_num(m.b)}], [{_num(m.c)}, {_num(m.d)}]]"


def _print_symbolic(rule: SymbolicRule1D) -> str:
    body = " ".join(f"{a} -> {' '.join(rule.images[a])};" for a in rule.alphabet)
    return f"symbolic {rule.name} {{ {body} }}"


def _print_grid(rule: GridRule) -> str:
    lines = [f"grid {rule.name} expansion={rule.expansion} {{"]
    for a in rule.alphabet:
        rows = " / ".join(" ".join(r) for r in rule.images[a])
        lines.append(f"  {a} -> {rows};")
    for a, lab in rule.labels.items():
        lines.append(f"  label {a} {json.dumps(lab)};")
    lines.append("}")
    return "\n".join(lines)


def _print_geometric(rule) -> str:
    lines = [f"geometric {rule.name} {{", f"  expansion = {_matrix(rule.expansion)};"]
    if rule.equivalence != "translation":
        lines.append(f"  equivalence = {rule.equivalence};")
    if rule.dimension != 2:
        lines.append(f"  dimension = {rule.dimension};")
    for p in rule.prototiles:
        pts = " ".join(f"({_num(v.x)}, {_num(v.y)})" for v in p.shape.vertices)
        lab = f" label {json.dumps(p.label)}" if p.label != p.id else ""
        lines.append(f"  prototile {p.id}{lab} polygon {pts};")
    for pid in rule.ids:
        for c, m in rule.children[pid]:
            t = m.translation
            lines.append(f"  child {pid} <- {c} linear={_matrix(m.linear)} t=({_num(t.x)}, {_num(t.y)});")
    lines.append("}")
    return "\n".join(lines)


def _print_dpv(rule) -> str:
    out = []
    names = []
    for f in (rule.horizontal, rule.vertical):
        if f.name not in names:
            names.append(f.name)
            out.append(_print_symbolic(f))
    lines = [f"dpv {rule.name} from {rule.horizontal.name} x {rule.vertical.name} {{"]
    if rule.rescaled:
        lines.append("  rescaled;")
    for xy in rule.letters:
        if xy not in rule.custom:
            continue
        items = ",\n    ".join(f"({c[0]},{c[1]}) at ({ox}, {oy})" for c, (ox, oy) in rule.arrangement[xy])
        lines.append(f"  arrange ({xy[0]},{xy[1]}):\n    {items};")
    lines.append("}")
    out.append("\n".join(lines))
    return "\n".join(out)


def _print_recurrence(rule) -> str:
    base = " ".join(f"{a} -> {' '.join(w)};" for a, w in rule.images.items())
    seeds = " ".join(f"v{k}=({x},{y})" for k, (x, y) in enumerate(rule.seeds))
    terms = []
    for lag, c in sorted(rule.recurrence.items(), key=lambda kv: -kv[0]):
        mag = abs(c)
        body = f"v[n-{lag}]" if mag == 1 else f"{mag}*v[n-{lag}]"
        if not terms:
            terms.append(("-" if c < 0 else "") + body)
        else:
            terms.append(("- " if c < 0 else "+ ") + body)
    return (
        f"recurrence {rule.name} {{\n  base: {base}\n  seeds {seeds};\n  rec v[n] = {' '.join(terms)};\n}}"
    )


def format_rule(rule) -> str:
    """Source text that parses back to an equal rule."""
    from .combrule import DPVRule, RecurrenceRule
    from .georule import GeometricRule

    if isinstance(rule, SymbolicRule1D):
        return _print_symbolic(rule)
    if isinstance(rule, GridRule):
        return _print_grid(rule)
    if isinstance(rule, GeometricRule):
        return _print_geometric(rule)
    if isinstance(rule, DPVRule):
        return _print_dpv(rule)
    if isinstance(rule, RecurrenceRule):
        return _print_recurrence(rule)
    raise TypeError(f"cannot print {type(rule).__name__}")
