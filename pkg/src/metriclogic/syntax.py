"""Parenthesized prefix syntax for formulas.

Grammar:
    formula := rational | (d t t) | (NAME t*) | (half f) | (dotminus f f)
             | (min f f) | (max f f) | (absdiff f f) | (neg f)
             | (dotplus f f) | (scale rational f) | (sup var f) | (inf var f)
    t       := variable | constant-name

Rationals are written num/den (or a bare integer).  Head names other than
the keywords are relation symbols looked up in the signature; bare terms are
constants when the signature declares them and variables otherwise.  Parse
errors carry the character position.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

from .formula import (AbsDiff, AtomD, AtomR, Const, ConstName, DotMinus,
                      DotPlus, DotScale, Formula, FormulaError, Half, Inf,
                      Max, Min, Neg, PURE_METRIC, Signature, Sup, Var)
from .rational import format_rational

KEYWORDS = {"d", "half", "dotminus", "min", "max", "absdiff", "neg",
            "dotplus", "scale", "sup", "inf"}


class ParseError(FormulaError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class _Token:
    text: str
    pos: int


def _tokenize(text: str) -> List[_Token]:
    tokens, i = [], 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            tokens.append(_Token(c, i))
            i += 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()":
                j += 1
            tokens.append(_Token(text[i:j], i))
            i = j
    return tokens


def _is_rational(tok: str) -> bool:
    body = tok.split("/")
    return all(part and (part.lstrip("-").isdigit()) for part in body) and len(body) <= 2


def _rational(tok: _Token) -> Fraction:
    try:
        if "/" in tok.text:
            num, den = tok.text.split("/")
            value = Fraction(int(num), int(den))
        else:
            value = Fraction(int(tok.text))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {tok.text!r}", tok.pos) from None
    if not 0 <= value <= 1:
        raise ParseError(f"rational {tok.text} outside [0,1]", tok.pos)
    return value


def parse(text: str, sig: Signature = PURE_METRIC, loose: bool = False) -> Formula:
    """Parse a formula; with loose=True unknown relation heads are accepted
    with the arity they are written at (grammar-only validation)."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty input", 0)
    phi, rest = _parse_formula(tokens, 0, sig, loose)
    if rest != len(tokens):
        raise ParseError(f"trailing input {tokens[rest].text!r}", tokens[rest].pos)
    return phi


def _expect(tokens: List[_Token], k: int, what: str) -> _Token:
    if k >= len(tokens):
        pos = tokens[-1].pos + len(tokens[-1].text) if tokens else 0
        raise ParseError(f"unexpected end of input, expected {what}", pos)
    return tokens[k]


def _parse_term(tokens: List[_Token], k: int, sig: Signature):
    tok = _expect(tokens, k, "a term")
    if tok.text in "()":
        raise ParseError("expected a term", tok.pos)
    if _is_rational(tok.text):
        raise ParseError(f"{tok.text!r} is a number, not a term", tok.pos)
    if sig.is_constant(tok.text):
        return ConstName(tok.text), k + 1
    return Var(tok.text), k + 1


def _parse_formula(tokens: List[_Token], k: int, sig: Signature,
                   loose: bool = False) -> Tuple[Formula, int]:
    tok = _expect(tokens, k, "a formula")
    if tok.text == ")":
        raise ParseError("unexpected ')'", tok.pos)
    if tok.text != "(":
        if _is_rational(tok.text):
            return Const(_rational(tok)), k + 1
        raise ParseError(f"expected a formula, got {tok.text!r}", tok.pos)

    head = _expect(tokens, k + 1, "an operator or relation name")
    if head.text in "()":
        raise ParseError("expected an operator or relation name", head.pos)
    k = k + 2

    def close(k2, node):
        tok2 = _expect(tokens, k2, "')'")
        if tok2.text != ")":
            raise ParseError(f"expected ')', got {tok2.text!r}", tok2.pos)
        return node, k2 + 1

    name = head.text
    if name == "d":
        t1, k = _parse_term(tokens, k, sig)
        t2, k = _parse_term(tokens, k, sig)
        return close(k, AtomD(t1, t2))
    if name == "half":
        body, k = _parse_formula(tokens, k, sig, loose)
        return close(k, Half(body))
    if name == "neg":
        body, k = _parse_formula(tokens, k, sig, loose)
        return close(k, Neg(body))
    if name == "scale":
        qtok = _expect(tokens, k, "a rational")
        if not _is_rational(qtok.text):
            raise ParseError(f"expected a rational scale factor, got {qtok.text!r}", qtok.pos)
        try:
            factor = Fraction(qtok.text)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad rational {qtok.text!r}", qtok.pos) from None
        if factor <= 0:
            raise ParseError("scale factor must be positive", qtok.pos)
        body, k = _parse_formula(tokens, k + 1, sig, loose)
        return close(k, DotScale(factor, body))
    if name in ("dotminus", "dotplus", "min", "max", "absdiff"):
        cls = {"dotminus": DotMinus, "dotplus": DotPlus,
               "min": Min, "max": Max, "absdiff": AbsDiff}[name]
        left, k = _parse_formula(tokens, k, sig, loose)
        right, k = _parse_formula(tokens, k, sig, loose)
        return close(k, cls(left, right))
    if name in ("sup", "inf"):
        vtok = _expect(tokens, k, "a variable")
        if vtok.text in "()" or _is_rational(vtok.text) or vtok.text in KEYWORDS:
            raise ParseError(f"expected a variable, got {vtok.text!r}", vtok.pos)
        if sig.is_constant(vtok.text):
            raise ParseError(f"{vtok.text!r} is a constant, cannot quantify it", vtok.pos)
        body, k = _parse_formula(tokens, k + 1, sig, loose)
        cls = Sup if name == "sup" else Inf
        return close(k, cls(vtok.text, body))

    # Anything else is a relation atom.
    if not sig.has_relation(name):
        if not loose:
            raise ParseError(f"unknown symbol {name!r}", head.pos)
        args = []
        while True:
            tok = _expect(tokens, k, "a term or ')'")
            if tok.text == ")":
                if not args:
                    raise ParseError(f"relation {name!r} needs arguments", tok.pos)
                return AtomR(name, tuple(args)), k + 1
            t, k = _parse_term(tokens, k, sig)
            args.append(t)
    rel = sig.relation(name)
    args = []
    for _ in range(rel.arity):
        t, k = _parse_term(tokens, k, sig)
        args.append(t)
    nxt = _expect(tokens, k, "')'")
    if nxt.text != ")":
        raise ParseError(
            f"arity mismatch: {name} takes {rel.arity} arguments", nxt.pos)
    return AtomR(name, tuple(args)), k + 1


def print_formula(phi: Formula) -> str:
    if isinstance(phi, Const):
        return format_rational(phi.value)
    if isinstance(phi, AtomD):
        return f"(d {phi.left.name} {phi.right.name})"
    if isinstance(phi, AtomR):
        args = " ".join(t.name for t in phi.args)
        return f"({phi.name} {args})"
    if isinstance(phi, Half):
        return f"(half {print_formula(phi.body)})"
    if isinstance(phi, Neg):
        return f"(neg {print_formula(phi.body)})"
    if isinstance(phi, DotScale):
        return f"(scale {format_rational(phi.factor)} {print_formula(phi.body)})"
    if isinstance(phi, DotMinus):
        return f"(dotminus {print_formula(phi.left)} {print_formula(phi.right)})"
    if isinstance(phi, DotPlus):
        return f"(dotplus {print_formula(phi.left)} {print_formula(phi.right)})"
    if isinstance(phi, Min):
        return f"(min {print_formula(phi.left)} {print_formula(phi.right)})"
    if isinstance(phi, Max):
        return f"(max {print_formula(phi.left)} {print_formula(phi.right)})"
    if isinstance(phi, AbsDiff):
        return f"(absdiff {print_formula(phi.left)} {print_formula(phi.right)})"
    if isinstance(phi, Sup):
        return f"(sup {phi.var} {print_formula(phi.body)})"
    if isinstance(phi, Inf):
        return f"(inf {phi.var} {print_formula(phi.body)})"
    raise FormulaError(f"cannot print {phi!r}")
