"""Recursive-descent parser for constraint statements.

Grammar (one statement per line)::

    statement   := inequality enforcement qualifier [group]
    inequality  := operand relop operand
    operand     := IDENT | NUMBER
    relop       := '<' | '<=' | '>' | '>='
    enforcement := 'at' 'time' '=' NUMBER
                 | 'always' ['between' timepair]
                 | 'once' ['between' timepair]
                 | 'between' timepair             # same as 'always between'
    timepair    := 'time' '=' NUMBER ',' 'time' '=' NUMBER
    qualifier   := 'weight' NUMBER
                 | 'confidence' NUMBER 'tolerance' NUMBER
                 | 'pmin' NUMBER 'pmax' NUMBER 'tolerance' NUMBER
    group       := 'group' IDENT [IDENT]
"""

from ..errors import ConstraintSyntaxError
from .ast import ConstraintStatement, Enforcement, Likelihood, LikelihoodAsym, Span, Weight
from .lexer import Token, tokenize, tokenize_line


class _Parser:
    def __init__(self, tokens, source=None):
        self.tokens = list(tokens)
        if not self.tokens or self.tokens[-1].kind != "eol":
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            col = last.column + len(last.text) if last else 1
            self.tokens.append(Token("eol", "", line, col))
        self.pos = 0
        self.source = source

    @property
    def tok(self):
        return self.tokens[self.pos]

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ConstraintSyntaxError(message, tok.line, tok.column, self.source)

    def expect(self, kind, text=None, what=None):
        tok = self.tok
        if tok.kind != kind or (text is not None and tok.text != text):
            if what is None:
                what = repr(text) if text is not None else (repr(kind) if kind in ("=", ",") else kind)
            raise self.error(f"expected {what}, found {tok}")
        self.pos += 1
        return tok

    def accept(self, kind, text=None):
        tok = self.tok
        if tok.kind == kind and (text is None or tok.text == text):
            self.pos += 1
            return tok
        return None

    def number(self, what="number"):
        return self.expect("number", what=what).value

    def operand(self):
        tok = self.tok
        if tok.kind == "ident":
            self.pos += 1
            return tok.text
        if tok.kind == "number":
            self.pos += 1
            return tok.value
        raise self.error(f"expected observable name or number, found {tok}")

    def time_value(self):
        self.expect("keyword", "time")
        self.expect("=")
        tok = self.tok
        t = self.number("time value")
        if t < 0:
            raise self.error("time must be non-negative", tok)
        return t

    def window(self):
        start_tok = self.tok
        t0 = self.time_value()
        self.expect(",")
        t1 = self.time_value()
        if not t0 < t1:
            raise self.error(f"window start {t0:g} must precede end {t1:g}", start_tok)
        return (t0, t1)

    def enforcement(self):
        tok = self.tok
        if self.accept("keyword", "at"):
            return Enforcement("at", time=self.time_value())
        if tok.kind == "keyword" and tok.text in ("always", "once"):
            self.pos += 1
            window = self.window() if self.accept("keyword", "between") else None
            return Enforcement(tok.text, window=window)
        if self.accept("keyword", "between"):
            return Enforcement("always", window=self.window())
        raise self.error(f"expected enforcement ('at', 'always', 'once' or 'between'), found {tok}")

    def prob(self, name, lo_open, hi_open=False):
        tok = self.tok
        v = self.number(f"{name} value")
        lo_ok = v > 0 if lo_open else v >= 0
        hi_ok = v < 1 if hi_open else v <= 1
        if not (lo_ok and hi_ok):
            lo = "(0" if lo_open else "[0"
            hi = "1)" if hi_open else "1]"
            raise self.error(f"{name} {v:g} outside {lo}, {hi}", tok)
        return v

    def non_negative(self, name):
        tok = self.tok
        v = self.number(f"{name} value")
        if v < 0:
            raise self.error(f"{name} must be non-negative", tok)
        return v

    def qualifier(self):
        tok = self.tok
        if self.accept("keyword", "weight"):
            return Weight(self.non_negative("weight"))
        if self.accept("keyword", "confidence"):
            k = self.prob("confidence", lo_open=True)
            self.expect("keyword", "tolerance")
            return Likelihood(k, self.non_negative("tolerance"))
        if self.accept("keyword", "pmin"):
            pmin = self.prob("pmin", lo_open=False, hi_open=True)
            self.expect("keyword", "pmax")
            pmax_tok = self.tok
            pmax = self.prob("pmax", lo_open=True)
            if not pmin < pmax:
                raise self.error(f"pmin {pmin:g} must be below pmax {pmax:g}", pmax_tok)
            self.expect("keyword", "tolerance")
            return LikelihoodAsym(pmin, pmax, self.non_negative("tolerance"))
        raise self.error(f"expected 'weight', 'confidence' or 'pmin', found {tok}")

    def statement(self):
        first = self.tok
        lhs = self.operand()
        op = self.expect("relop", what="comparison operator").text
        rhs = self.operand()
        if not isinstance(lhs, str) and not isinstance(rhs, str):
            raise self.error("at least one side of the inequality must be an observable", first)
        enforcement = self.enforcement()
        qualifier = self.qualifier()
        group = category = None
        if self.accept("keyword", "group"):
            group = self.expect("ident", what="group name").text
            cat = self.accept("ident")
            category = cat.text if cat else None
        last = self.tokens[self.pos - 1]
        self.expect("eol", what="end of statement")
        span = Span(first.line, first.column, last.column + len(last.text))
        return ConstraintStatement(lhs, op, rhs, enforcement, qualifier, group, category,
                                   span=span, source=self.source)


def parse_statement(tokens_or_text, line=1):
    """Parse one statement from text or from its token list."""
    if isinstance(tokens_or_text, str):
        source = tokens_or_text
        tokens = tokenize_line(source, line)
    else:
        source = None
        tokens = list(tokens_or_text)
    if not tokens or all(t.kind == "eol" for t in tokens):
        raise ConstraintSyntaxError("empty statement", line, 1, source)
    return _Parser(tokens, source).statement()


def parse_constraints(source):
    """Parse a constraint file; returns statements in file order.

    The first error stops parsing and is raised with its line and column.
    """
    statements = []
    lines = source.splitlines()
    for lineno, text in enumerate(lines, start=1):
        tokens = tokenize_line(text, lineno)
        if tokens:
            statements.append(_Parser(tokens, text).statement())
    return statements


def parse_constraints_collect(source):
    """Like :func:`parse_constraints` but collects every line's error."""
    statements, errors = [], []
    for lineno, text in enumerate(source.splitlines(), start=1):
        try:
            tokens = tokenize_line(text, lineno)
            if tokens:
                statements.append(_Parser(tokens, text).statement())
        except ConstraintSyntaxError as exc:
            errors.append(exc)
    return statements, errors


__all__ = ["parse_constraints", "parse_constraints_collect", "parse_statement", "tokenize"]
