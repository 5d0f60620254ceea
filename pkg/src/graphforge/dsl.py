"""Textual graph language: parser with positioned errors, serializer.

Grammar (whitespace-insensitive, `#` line comments, UTF-8):

    graph    := "graph" STRING "{" decl* "}"
    decl     := input | param | node | output | loss
    input    := "input" IDENT ":" shape ";"
    param    := "param" IDENT ":" shape "init" "=" ("zeros"|"glorot") ";"
    node     := "node" IDENT "=" IDENT "(" IDENT ("," IDENT)* ")" ";"
    output   := "output" IDENT ";"
    loss     := "loss" "cross_entropy" "(" IDENT ")" ";"
    shape    := "[" ("?"|INT) ("," INT)* "]"

Op identifiers are matmul, addbias, relu and softmax. Parsing never
stops at the first problem: inside a declaration it resynchronizes on
the next ";" (or "}") and keeps going, so the caller always receives
the complete error list.

serialize() emits one declaration per line in declaration order;
canonical_serialize() name-sorts the declarations within each section
and encodes to UTF-8 bytes. The canonical byte form is the substrate
for all bit and compression measures, so its layout is frozen:

    graph "NAME" {
    input NAME: [?,784];
    param NAME: [784,10] init=glorot;
    node NAME = op(a, b);
    output NAME;
    loss cross_entropy(NAME);
    }
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import (
    OP_NAMES,
    GraphSpec,
    InputDecl,
    LossDecl,
    NodeDecl,
    ParamDecl,
    Shape,
    WILDCARD,
)

KEYWORDS = {"graph", "input", "param", "node", "output", "loss", "init", "zeros", "glorot", "cross_entropy"}

_PUNCT = set("{}[]():,;=?")


@dataclass(frozen=True)
class ParseError:
    line: int  # 1-based
    column: int  # 1-based
    message: str
    category: str  # lexical | syntactic | semantic

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.category}: {self.message}"


class ParseFailure(ValueError):
    """Raised by parse(); carries every ParseError found in the source."""

    def __init__(self, errors: list[ParseError]):
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = errors


@dataclass(frozen=True)
class _Token:
    kind: str  # keyword | ident | int | string | punct | eof
    text: str
    line: int
    column: int


def _tokenize(text: str) -> tuple[list[_Token], list[ParseError]]:
    tokens: list[_Token] = []
    errors: list[ParseError] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def advance(k: int):
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            advance(1)
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                advance(1)
            continue
        start_line, start_col = line, col
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "keyword" if word in KEYWORDS else "ident"
            tokens.append(_Token(kind, word, start_line, start_col))
            advance(j - i)
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], start_line, start_col))
            advance(j - i)
            continue
        if c == '"':
            j = i + 1
            while j < n and text[j] not in '"\n':
                j += 1
            if j >= n or text[j] != '"':
                errors.append(ParseError(start_line, start_col, "unterminated string", "lexical"))
                advance(j - i)
                continue
            tokens.append(_Token("string", text[i + 1 : j], start_line, start_col))
            advance(j - i + 1)
            continue
        if c in _PUNCT:
            tokens.append(_Token("punct", c, start_line, start_col))
            advance(1)
            continue
        errors.append(ParseError(start_line, start_col, f"unexpected character {c!r}", "lexical"))
        advance(1)
    tokens.append(_Token("eof", "", line, col))
    return tokens, errors


_IDENT_OK = lambda s: s and (s[0].isalpha() or s[0] == "_") and all(ch.isalnum() or ch == "_" for ch in s)


class _Parser:
    """Recursive descent over the token list, resyncing on ';' per decl."""

    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.errors: list[ParseError] = []

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def _bump(self) -> _Token:
        tok = self.cur
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def _error(self, tok: _Token, message: str, category: str = "syntactic"):
        self.errors.append(ParseError(tok.line, tok.column, message, category))

    def _expect_punct(self, ch: str) -> _Token:
        if self.cur.kind == "punct" and self.cur.text == ch:
            return self._bump()
        self._error(self.cur, f"expected '{ch}', found {self._describe(self.cur)}")
        raise _Resync()

    def _expect_keyword(self, word: str) -> _Token:
        if self.cur.kind == "keyword" and self.cur.text == word:
            return self._bump()
        self._error(self.cur, f"expected '{word}', found {self._describe(self.cur)}")
        raise _Resync()

    def _expect_ident(self, what: str) -> _Token:
        if self.cur.kind == "ident":
            return self._bump()
        self._error(self.cur, f"expected {what}, found {self._describe(self.cur)}")
        raise _Resync()

    @staticmethod
    def _describe(tok: _Token) -> str:
        return "end of input" if tok.kind == "eof" else f"'{tok.text}'"

    def _resync(self):
        """Skip to just past the next ';' (or stop before '}' / eof)."""
        while True:
            tok = self.cur
            if tok.kind == "eof":
                return
            if tok.kind == "punct" and tok.text == ";":
                self._bump()
                return
            if tok.kind == "punct" and tok.text == "}":
                return
            self._bump()

    def parse_shape(self) -> Shape:
        self._expect_punct("[")
        dims: list = []
        tok = self.cur
        if tok.kind == "punct" and tok.text == "?":
            self._bump()
            dims.append(WILDCARD)
        elif tok.kind == "int":
            self._bump()
            if int(tok.text) < 1:
                self._error(tok, "dimensions must be positive", "semantic")
                raise _Resync()
            dims.append(int(tok.text))
        else:
            self._error(tok, f"expected '?' or a dimension, found {self._describe(tok)}")
            raise _Resync()
        while self.cur.kind == "punct" and self.cur.text == ",":
            self._bump()
            tok = self.cur
            if tok.kind == "int":
                self._bump()
                if int(tok.text) < 1:
                    self._error(tok, "dimensions must be positive", "semantic")
                    raise _Resync()
                dims.append(int(tok.text))
            elif tok.kind == "punct" and tok.text == "?":
                self._error(tok, "wildcard allowed only as the first dimension", "semantic")
                raise _Resync()
            else:
                self._error(tok, f"expected a dimension, found {self._describe(tok)}")
                raise _Resync()
        self._expect_punct("]")
        return Shape(tuple(dims))

    def parse(self) -> GraphSpec | None:
        try:
            self._expect_keyword("graph")
            name_tok = self.cur
            if name_tok.kind != "string":
                self._error(name_tok, f"expected a quoted graph name, found {self._describe(name_tok)}")
                raise _Resync()
            self._bump()
            if not _IDENT_OK(name_tok.text):
                self._error(name_tok, f"graph name {name_tok.text!r} is not an identifier", "semantic")
            self._expect_punct("{")
        except _Resync:
            return None

        inputs: list[InputDecl] = []
        params: list[ParamDecl] = []
        nodes: list[NodeDecl] = []
        output: str | None = None
        loss: LossDecl | None = None
        positions: dict = {}
        declared: set[str] = set()

        def declare(tok: _Token):
            if tok.text in declared:
                self._error(tok, f"'{tok.text}' already declared", "semantic")
            declared.add(tok.text)
            positions[tok.text] = (tok.line, tok.column)

        while True:
            tok = self.cur
            if tok.kind == "eof":
                self._error(tok, "expected '}' before end of input")
                break
            if tok.kind == "punct" and tok.text == "}":
                self._bump()
                positions["}"] = (tok.line, tok.column)
                break
            try:
                if tok.kind != "keyword":
                    self._error(tok, f"expected a declaration, found {self._describe(tok)}")
                    raise _Resync()
                if tok.text == "input":
                    self._bump()
                    name = self._expect_ident("input name")
                    declare(name)
                    self._expect_punct(":")
                    shape = self.parse_shape()
                    self._expect_punct(";")
                    inputs.append(InputDecl(name.text, shape))
                elif tok.text == "param":
                    self._bump()
                    name = self._expect_ident("param name")
                    declare(name)
                    self._expect_punct(":")
                    shape = self.parse_shape()
                    self._expect_keyword("init")
                    self._expect_punct("=")
                    init_tok = self.cur
                    if init_tok.kind == "keyword" and init_tok.text in ("zeros", "glorot"):
                        self._bump()
                    else:
                        self._error(init_tok, f"expected 'zeros' or 'glorot', found {self._describe(init_tok)}")
                        raise _Resync()
                    self._expect_punct(";")
                    params.append(ParamDecl(name.text, shape, init_tok.text))
                elif tok.text == "node":
                    self._bump()
                    name = self._expect_ident("node name")
                    declare(name)
                    self._expect_punct("=")
                    op_tok = self._expect_ident("an operation name")
                    self._expect_punct("(")
                    args = [self._expect_ident("an operand name")]
                    while self.cur.kind == "punct" and self.cur.text == ",":
                        self._bump()
                        args.append(self._expect_ident("an operand name"))
                    self._expect_punct(")")
                    self._expect_punct(";")
                    op = OP_NAMES.get(op_tok.text)
                    if op is None:
                        self._error(op_tok, f"unknown operation '{op_tok.text}'", "semantic")
                        continue
                    if len(args) != op.arity:
                        self._error(
                            op_tok,
                            f"'{op.value}' takes {op.arity} operand(s), got {len(args)}",
                            "semantic",
                        )
                        continue
                    nodes.append(NodeDecl(name.text, op, tuple(t.text for t in args)))
                elif tok.text == "output":
                    out_tok = self._bump()
                    name = self._expect_ident("output node name")
                    self._expect_punct(";")
                    if output is not None:
                        self._error(out_tok, "output already declared", "semantic")
                        continue
                    output = name.text
                    positions["output " + name.text] = (name.line, name.column)
                elif tok.text == "loss":
                    loss_tok = self._bump()
                    self._expect_keyword("cross_entropy")
                    self._expect_punct("(")
                    target = self._expect_ident("a prediction node name")
                    self._expect_punct(")")
                    self._expect_punct(";")
                    if loss is not None:
                        self._error(loss_tok, "loss already declared", "semantic")
                        continue
                    loss = LossDecl("cross_entropy", target.text)
                    positions["loss " + target.text] = (target.line, target.column)
                else:
                    self._error(tok, f"'{tok.text}' cannot start a declaration")
                    raise _Resync()
            except _Resync:
                self._resync()

        # Reference resolution: every operand, the output and the loss
        # target must name a declaration (semantic errors with position).
        for node in nodes:
            pos_line, pos_col = positions.get(node.name, (1, 1))
            for o in node.operands:
                if o not in declared:
                    self._error(
                        _Token("ident", o, pos_line, pos_col),
                        f"node '{node.name}' references undeclared '{o}'",
                        "semantic",
                    )
        node_names = {n.name for n in nodes}
        if output is not None and output not in node_names:
            line, col = positions.get("output " + output, (1, 1))
            self._error(_Token("ident", output, line, col), f"unresolved output '{output}'", "semantic")
        if loss is not None and loss.target not in node_names:
            line, col = positions.get("loss " + loss.target, (1, 1))
            self._error(
                _Token("ident", loss.target, line, col),
                f"loss target '{loss.target}' is not a node",
                "semantic",
            )

        return GraphSpec(
            name=name_tok.text,
            inputs=tuple(inputs),
            params=tuple(params),
            nodes=tuple(nodes),
            output=output,
            loss=loss,
            positions=positions,
        )


class _Resync(Exception):
    pass


def parse(text: str) -> GraphSpec:
    """Parse DSL source into a GraphSpec.

    Raises ParseFailure carrying every lexical/syntactic/semantic error,
    each with a 1-based line and column.
    """
    tokens, lex_errors = _tokenize(text)
    parser = _Parser(tokens)
    spec = parser.parse()
    errors = lex_errors + parser.errors
    if errors:
        raise ParseFailure(sorted(errors, key=lambda e: (e.line, e.column)))
    assert spec is not None
    return spec


def parse_bytes(data: bytes) -> GraphSpec:
    """Parse raw bytes, mapping undecodable sequences to U+FFFD."""
    return parse(data.decode("utf-8", errors="replace"))


def _emit(spec: GraphSpec, sort_sections: bool) -> str:
    inputs = sorted(spec.inputs, key=lambda d: d.name) if sort_sections else spec.inputs
    params = sorted(spec.params, key=lambda d: d.name) if sort_sections else spec.params
    nodes = sorted(spec.nodes, key=lambda d: d.name) if sort_sections else spec.nodes
    lines = [f'graph "{spec.name}" {{']
    for d in inputs:
        lines.append(f"input {d.name}: {d.shape};")
    for p in params:
        lines.append(f"param {p.name}: {p.shape} init={p.init};")
    for n in nodes:
        lines.append(f"node {n.name} = {n.op.value}({', '.join(n.operands)});")
    if spec.output is not None:
        lines.append(f"output {spec.output};")
    if spec.loss is not None:
        lines.append(f"loss {spec.loss.kind}({spec.loss.target});")
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize(spec: GraphSpec) -> str:
    """DSL source for a spec, declarations in declaration order.

    parse(serialize(s)) is structurally equal to s.
    """
    return _emit(spec, sort_sections=False)


def canonical_serialize(spec: GraphSpec) -> bytes:
    """Deterministic byte form: name-sorted declarations, UTF-8.

    Specs equal up to declaration reordering yield identical bytes; any
    structural difference changes the bytes.
    """
    return _emit(spec, sort_sections=True).encode("utf-8")
