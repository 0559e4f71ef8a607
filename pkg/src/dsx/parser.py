"""Tokenizer and parser for ``.dsx`` connector description files.

The surface syntax is block-structured::

    connector "name" {
      discovery { ... }
      metadata { ... }
      usage edc|opcua|plain { ... }
      access { ... }
    }

``parse`` never raises on malformed input: every problem becomes a
:class:`~dsx.model.Diagnostic` and the parser resynchronizes at block
boundaries so several errors can be reported per run.  A model is only
returned when the file produced zero errors.

Alongside the model, ``parse`` returns a :class:`SourceMap` that maps
model paths (``"metadata.modified"``, ``"access.roles[operator]"``) to
source spans, which the validator uses to anchor its findings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import Union

from .model import (
    NAME_RE,
    AccessPolicy,
    AssetMetaData,
    AuthenticationMode,
    ConnectorModel,
    ContractValue,
    Diagnostic,
    EdcUsage,
    GrantType,
    IdentificationData,
    IdentifierType,
    MessageSecurityMode,
    OAuthInfo,
    OpcUaUsage,
    Permission,
    PlainUsage,
    Protocol,
    PushEndpointsConfig,
    QosMetrics,
    Role,
    SecretEnvVar,
    SecretLiteral,
    SecurityPolicy,
    Severity,
    Span,
    UsageConfig,
    IdentityProviderConfig,
)

MAX_DIAGNOSTICS = 100


class TokenKind(Enum):
    IDENT = "identifier"
    STRING = "string"
    INTEGER = "integer"
    DATE = "date"
    BOOLEAN = "boolean"
    LBRACE = "'{'"
    RBRACE = "'}'"
    LBRACKET = "'['"
    RBRACKET = "']'"
    COLON = "':'"
    COMMA = "','"
    KEYWORD = "keyword"
    ENV_REF = "env reference"
    EOF = "end of file"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    span: Span
    value: object = None

    def describe(self) -> str:
        if self.kind in (TokenKind.KEYWORD, TokenKind.IDENT):
            return f"'{self.lexeme}'"
        return self.kind.value


KEYWORDS = frozenset(
    {
        "connector",
        "discovery",
        "metadata",
        "usage",
        "access",
        "contract",
        "roles",
        "role",
        "push",
        "qos",
        "identity",
        "oauth",
        "edc",
        "opcua",
        "plain",
    }
)

SECTION_KEYWORDS = ("discovery", "metadata", "usage", "access")
_STRUCTURAL = frozenset({"connector", *SECTION_KEYWORDS})

_DATE_RE = re.compile(r"[0-9]{4}-[0-9]{2}-[0-9]{2}(?![0-9])")
_INT_RE = re.compile(r"[0-9]+")
# Hyphens are allowed after the first character so role names such as
# "night-shift" lex as one identifier; '-' only starts a negative integer.
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*")
_ENV_BODY_RE = re.compile(r"[A-Z][A-Z0-9_]*")
_ASCII_DIGITS = frozenset("0123456789")
_ASCII_IDENT_START = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")


class _Sink:
    """Collects diagnostics, capping the total per file at MAX_DIAGNOSTICS."""

    def __init__(self) -> None:
        self.diagnostics: list[Diagnostic] = []
        self.full = False

    def error(self, code: str, message: str, span: Span) -> None:
        self._add(Severity.ERROR, code, message, span)

    def _add(self, severity: Severity, code: str, message: str, span: Span) -> None:
        if self.full:
            return
        if len(self.diagnostics) >= MAX_DIAGNOSTICS - 1:
            self.diagnostics.append(
                Diagnostic(Severity.ERROR, "E099", "too many errors", span)
            )
            self.full = True
            return
        self.diagnostics.append(Diagnostic(severity, code, message, span))

    @property
    def has_errors(self) -> bool:
        return any(d.severity is Severity.ERROR for d in self.diagnostics)


def _lex(source: str, file: str, sink: _Sink) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def make(kind: TokenKind, lexeme: str, tline: int, tcol: int, value: object = None) -> None:
        tokens.append(Token(kind, lexeme, Span(file, tline, tcol, len(lexeme)), value))

    while i < n and not sink.full:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r﻿":
            i += 1
            col += 1
            continue
        if ch == "/" and source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
                col += 1
            continue
        if ch == '"':
            start_line, start_col, start_index = line, col, i
            i += 1
            col += 1
            chars: list[str] = []
            terminated = False
            while i < n:
                c = source[i]
                if c == '"':
                    i += 1
                    col += 1
                    terminated = True
                    break
                if c in "\n\r":
                    break
                if c == "\\" and i + 1 < n and source[i + 1] in ('"', "\\"):
                    chars.append(source[i + 1])
                    i += 2
                    col += 2
                    continue
                if ord(c) < 0x20 or c == "\x7f":
                    sink.error(
                        "E002",
                        "control character in string literal",
                        Span(file, line, col, 1),
                    )
                    i += 1
                    col += 1
                    continue
                chars.append(c)
                i += 1
                col += 1
            if not terminated:
                sink.error(
                    "E001", "unterminated string literal", Span(file, start_line, start_col, 1)
                )
                continue
            # The lexeme keeps the raw source slice; the decoded text is the value.
            tokens.append(
                Token(
                    TokenKind.STRING,
                    source[start_index:i],
                    Span(file, start_line, start_col, col - start_col),
                    "".join(chars),
                )
            )
            continue
        if ch in _ASCII_DIGITS or (ch == "-" and source[i + 1 : i + 2] in _ASCII_DIGITS):
            if ch != "-":
                m = _DATE_RE.match(source, i)
                if m:
                    lexeme = m.group(0)
                    make(TokenKind.DATE, lexeme, line, col, lexeme)
                    i += len(lexeme)
                    col += len(lexeme)
                    continue
            m = _INT_RE.match(source, i + 1 if ch == "-" else i)
            lexeme = ("-" if ch == "-" else "") + m.group(0)
            make(TokenKind.INTEGER, lexeme, line, col, int(lexeme))
            i += len(lexeme)
            col += len(lexeme)
            continue
        if ch in _ASCII_IDENT_START:
            m = _IDENT_RE.match(source, i)
            lexeme = m.group(0)
            tline, tcol = line, col
            i += len(lexeme)
            col += len(lexeme)
            if lexeme == "env" and i < n and source[i] == "(":
                body = _ENV_BODY_RE.match(source, i + 1)
                if body and source[i + 1 + len(body.group(0)) : i + 2 + len(body.group(0))] == ")":
                    name = body.group(0)
                    full = f"env({name})"
                    make(TokenKind.ENV_REF, full, tline, tcol, name)
                    i += len(name) + 2
                    col += len(name) + 2
                    continue
                sink.error(
                    "E002",
                    "malformed env() reference (expected env(UPPER_CASE_NAME))",
                    Span(file, tline, tcol, 3),
                )
                i += 1
                col += 1
                continue
            if lexeme in ("true", "false"):
                make(TokenKind.BOOLEAN, lexeme, tline, tcol, lexeme == "true")
            elif lexeme in KEYWORDS:
                make(TokenKind.KEYWORD, lexeme, tline, tcol, lexeme)
            else:
                make(TokenKind.IDENT, lexeme, tline, tcol, lexeme)
            continue
        punct = {
            "{": TokenKind.LBRACE,
            "}": TokenKind.RBRACE,
            "[": TokenKind.LBRACKET,
            "]": TokenKind.RBRACKET,
            ":": TokenKind.COLON,
            ",": TokenKind.COMMA,
        }.get(ch)
        if punct is not None:
            make(punct, ch, line, col)
            i += 1
            col += 1
            continue
        sink.error("E002", f"illegal character {ch!r}", Span(file, line, col, 1))
        i += 1
        col += 1

    tokens.append(Token(TokenKind.EOF, "", Span(file, line, col, 0)))
    return tokens


def tokenize(source: str, file: str = "<input>") -> tuple[list[Token], list[Diagnostic]]:
    """Split source text into tokens; lexical problems become diagnostics."""
    sink = _Sink()
    tokens = _lex(source, file, sink)
    return tokens, sink.diagnostics


@dataclass
class SourceMap:
    """Maps model paths to the source spans they were parsed from."""

    file: str
    spans: dict[str, Span] = field(default_factory=dict)

    def record(self, path: str, span: Span) -> None:
        self.spans[path] = span

    def span_for(self, path: str) -> Span:
        """Best span for a path, walking up to enclosing constructs."""
        current = path
        while True:
            if current in self.spans:
                return self.spans[current]
            trimmed = re.sub(r"(\.[^.\[\]]+|\[[^\[\]]*\])$", "", current)
            if trimmed == current:
                break
            current = trimmed
        return self.spans.get("", Span(self.file, 1, 1, 0))


@dataclass
class ParseResult:
    model: ConnectorModel | None
    diagnostics: list[Diagnostic]
    source_map: SourceMap


@dataclass
class _Scalar:
    kind: TokenKind
    value: object
    span: Span


@dataclass
class _List:
    items: list[_Scalar]
    span: Span


@dataclass
class _EnvRef:
    name: str
    span: Span


_Value = Union[_Scalar, _List, _EnvRef]


@dataclass
class _RawBlock:
    label: str
    keyword_span: Span
    fields: dict[str, tuple[Span, _Value]] = field(default_factory=dict)
    blocks: dict[str, "_RawBlock"] = field(default_factory=dict)
    roles: list[tuple[str, Span, "_RawBlock"]] = field(default_factory=list)
    contract: list[tuple[str, Span, _Scalar]] = field(default_factory=list)


_SUBBLOCKS: dict[str, frozenset[str]] = {
    "usage": frozenset({"push", "qos"}),
    "access": frozenset({"contract", "roles", "identity", "oauth"}),
    "push": frozenset(),
    "qos": frozenset(),
    "contract": frozenset(),
    "roles": frozenset(),
    "identity": frozenset(),
    "oauth": frozenset(),
    "discovery": frozenset(),
    "metadata": frozenset(),
    "role": frozenset(),
}


class _Abort(Exception):
    pass


class _Parser:
    def __init__(self, tokens: list[Token], file: str, sink: _Sink) -> None:
        self.tokens = tokens
        self.pos = 0
        self.file = file
        self.sink = sink
        self.smap = SourceMap(file)

    # --- token plumbing ---------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def at(self, kind: TokenKind) -> bool:
        return self.peek().kind is kind

    def at_keyword(self, *names: str) -> bool:
        tok = self.peek()
        return tok.kind is TokenKind.KEYWORD and tok.lexeme in names

    def error(self, code: str, message: str, span: Span) -> None:
        self.sink.error(code, message, span)
        if self.sink.full:
            raise _Abort

    # --- error recovery ---------------------------------------------------

    def sync(self) -> None:
        """Skip tokens until a block boundary: '}' at depth 0, a structural
        keyword, or end of input."""
        depth = 0
        while True:
            tok = self.peek()
            if tok.kind is TokenKind.EOF:
                return
            if depth == 0:
                if tok.kind is TokenKind.RBRACE:
                    return
                if tok.kind is TokenKind.KEYWORD and tok.lexeme in _STRUCTURAL:
                    return
            if tok.kind is TokenKind.LBRACE:
                depth += 1
            elif tok.kind is TokenKind.RBRACE:
                depth -= 1
            self.advance()

    def skip_balanced_block(self) -> None:
        """Consume tokens up to and including a balanced '{ ... }'."""
        while not self.at(TokenKind.LBRACE):
            tok = self.peek()
            if tok.kind is TokenKind.EOF or tok.kind is TokenKind.RBRACE:
                return
            if tok.kind is TokenKind.KEYWORD and tok.lexeme in _STRUCTURAL:
                return
            self.advance()
        depth = 0
        while True:
            tok = self.advance()
            if tok.kind is TokenKind.EOF:
                return
            if tok.kind is TokenKind.LBRACE:
                depth += 1
            elif tok.kind is TokenKind.RBRACE:
                depth -= 1
                if depth == 0:
                    return

    # --- raw block parsing ------------------------------------------------

    def parse_raw_block(self, label: str, keyword_span: Span) -> _RawBlock:
        raw = _RawBlock(label, keyword_span)
        if not self.at(TokenKind.LBRACE):
            self.error(
                "E003",
                f"expected '{{' to open the {label} block, got {self.peek().describe()}",
                self.peek().span,
            )
            self.sync()
            return raw
        self.advance()
        allowed = _SUBBLOCKS.get(label, frozenset())
        while True:
            tok = self.peek()
            if tok.kind is TokenKind.RBRACE:
                self.advance()
                return raw
            if tok.kind is TokenKind.EOF:
                self.error("E003", f"unexpected end of file inside {label} block", tok.span)
                return raw
            if tok.kind is TokenKind.KEYWORD and tok.lexeme in _STRUCTURAL:
                self.error("E003", f"missing '}}' before {tok.describe()}", tok.span)
                return raw
            if tok.kind is TokenKind.KEYWORD and label == "roles" and tok.lexeme == "role":
                self.advance()
                self.parse_role_entry(raw)
                continue
            if tok.kind is TokenKind.KEYWORD and tok.lexeme in allowed:
                self.advance()
                sub = self.parse_raw_block(tok.lexeme, tok.span)
                if tok.lexeme in raw.blocks:
                    self.error("E015", f"duplicate {tok.lexeme} block", tok.span)
                else:
                    raw.blocks[tok.lexeme] = sub
                continue
            if tok.kind is TokenKind.KEYWORD and tok.lexeme in _SUBBLOCKS:
                self.error("E010", f"unknown block '{tok.lexeme}' in {label} block", tok.span)
                self.advance()
                self.skip_balanced_block()
                continue
            if label == "contract":
                if tok.kind is TokenKind.STRING:
                    self.parse_contract_entry(raw)
                    continue
                self.error(
                    "E003",
                    f"expected a quoted contract key or '}}', got {tok.describe()}",
                    tok.span,
                )
                self.advance()
                continue
            if tok.kind is TokenKind.IDENT:
                self.parse_field_entry(raw)
                continue
            self.error(
                "E003",
                f"expected a field name or '}}' in {label} block, got {tok.describe()}",
                tok.span,
            )
            self.advance()

    def parse_field_entry(self, raw: _RawBlock) -> None:
        key_tok = self.advance()
        if not self.at(TokenKind.COLON):
            self.error(
                "E003",
                f"expected ':' after field name '{key_tok.lexeme}'",
                self.peek().span,
            )
            return
        self.advance()
        value = self.parse_value()
        if value is None:
            return
        if key_tok.lexeme in raw.fields:
            self.error("E015", f"duplicate field '{key_tok.lexeme}'", key_tok.span)
            return
        raw.fields[key_tok.lexeme] = (key_tok.span, value)

    def parse_contract_entry(self, raw: _RawBlock) -> None:
        key_tok = self.advance()
        if not self.at(TokenKind.COLON):
            self.error("E003", "expected ':' after contract key", self.peek().span)
            return
        self.advance()
        value = self.parse_scalar()
        if value is None:
            return
        if self.at(TokenKind.COMMA):
            self.advance()
        key = key_tok.value
        if any(existing == key for existing, _, _ in raw.contract):
            self.error("E015", f"duplicate contract key \"{key}\"", key_tok.span)
            return
        raw.contract.append((str(key), key_tok.span, value))

    def parse_role_entry(self, raw: _RawBlock) -> None:
        name_tok = self.peek()
        if name_tok.kind is not TokenKind.IDENT:
            self.error(
                "E003", f"expected a role name, got {name_tok.describe()}", name_tok.span
            )
            self.skip_balanced_block()
            return
        self.advance()
        body = self.parse_raw_block("role", name_tok.span)
        raw.roles.append((name_tok.lexeme, name_tok.span, body))

    def parse_value(self) -> _Value | None:
        tok = self.peek()
        if tok.kind in (
            TokenKind.STRING,
            TokenKind.INTEGER,
            TokenKind.DATE,
            TokenKind.BOOLEAN,
            TokenKind.IDENT,
        ):
            return self.parse_scalar()
        if tok.kind is TokenKind.ENV_REF:
            self.advance()
            return _EnvRef(str(tok.value), tok.span)
        if tok.kind is TokenKind.LBRACKET:
            return self.parse_list()
        self.error("E003", f"expected a value, got {tok.describe()}", tok.span)
        return None

    def parse_scalar(self) -> _Scalar | None:
        tok = self.peek()
        if tok.kind is TokenKind.DATE:
            self.advance()
            try:
                value: object = date.fromisoformat(str(tok.value))
            except ValueError:
                self.error("E014", f"invalid calendar date '{tok.lexeme}'", tok.span)
                value = None
            return _Scalar(TokenKind.DATE, value, tok.span)
        if tok.kind in (TokenKind.STRING, TokenKind.INTEGER, TokenKind.BOOLEAN, TokenKind.IDENT):
            self.advance()
            return _Scalar(tok.kind, tok.value, tok.span)
        self.error("E003", f"expected a value, got {tok.describe()}", tok.span)
        return None

    def parse_list(self) -> _List | None:
        open_tok = self.advance()
        items: list[_Scalar] = []
        while True:
            tok = self.peek()
            if tok.kind is TokenKind.RBRACKET:
                self.advance()
                return _List(items, open_tok.span)
            if tok.kind in (TokenKind.EOF, TokenKind.RBRACE):
                self.error("E003", "unterminated list (missing ']')", open_tok.span)
                return _List(items, open_tok.span)
            scalar = self.parse_scalar()
            if scalar is None:
                self.advance()
                continue
            items.append(scalar)
            if self.at(TokenKind.COMMA):
                self.advance()

    # --- document ---------------------------------------------------------

    def parse_document(self) -> ConnectorModel | None:
        tok = self.peek()
        if not self.at_keyword("connector"):
            self.error("E011", "expected 'connector'", tok.span)
            return None
        connector_span = tok.span
        self.smap.record("", connector_span)
        self.advance()

        name: str | None = None
        if self.at(TokenKind.STRING):
            name_tok = self.advance()
            name = str(name_tok.value)
            if not NAME_RE.fullmatch(name):
                self.error("E014", f"invalid connector name {name!r}", name_tok.span)
                name = None
            else:
                self.smap.record("name", name_tok.span)
        else:
            self.error(
                "E003",
                f"expected a quoted connector name, got {self.peek().describe()}",
                self.peek().span,
            )

        sections: dict[str, tuple[Span, _RawBlock, str | None]] = {}
        if not self.at(TokenKind.LBRACE):
            self.error("E003", f"expected '{{', got {self.peek().describe()}", self.peek().span)
            self.sync()
        else:
            self.advance()
        closed = False
        while True:
            tok = self.peek()
            if tok.kind is TokenKind.RBRACE:
                self.advance()
                closed = True
                break
            if tok.kind is TokenKind.EOF:
                self.error("E003", "unexpected end of file inside connector block", tok.span)
                break
            if tok.kind is TokenKind.KEYWORD and tok.lexeme in SECTION_KEYWORDS:
                self.advance()
                variant = None
                if tok.lexeme == "usage":
                    if self.at_keyword("edc", "opcua", "plain"):
                        variant = self.advance().lexeme
                    else:
                        self.error(
                            "E003",
                            "expected usage variant 'edc', 'opcua', or 'plain'",
                            self.peek().span,
                        )
                raw = self.parse_raw_block(tok.lexeme, tok.span)
                if tok.lexeme in sections:
                    self.error("E012", f"duplicate {tok.lexeme} block", tok.span)
                else:
                    sections[tok.lexeme] = (tok.span, raw, variant)
                continue
            if tok.kind is TokenKind.KEYWORD and tok.lexeme == "connector":
                self.error("E003", "missing '}' before 'connector'", tok.span)
                break
            self.error(
                "E003",
                f"expected a section (discovery, metadata, usage, access), got {tok.describe()}",
                tok.span,
            )
            self.sync()
            if self.at(TokenKind.RBRACE):
                self.advance()
                closed = True
                break

        if closed:
            trailing = self.peek()
            if trailing.kind is TokenKind.KEYWORD and trailing.lexeme == "connector":
                self.error(
                    "E013", "multiple connector blocks in one file (only one allowed)", trailing.span
                )
            elif trailing.kind is not TokenKind.EOF:
                self.error(
                    "E003",
                    f"unexpected content after connector block: {trailing.describe()}",
                    trailing.span,
                )

        for section in SECTION_KEYWORDS:
            if section not in sections:
                self.error("E011", f"missing required section '{section}'", connector_span)

        identification = metadata = usage = access = None
        if "discovery" in sections:
            identification = self.bind_discovery(sections["discovery"][1])
        if "metadata" in sections:
            metadata = self.bind_metadata(sections["metadata"][1])
        if "usage" in sections:
            usage = self.bind_usage(sections["usage"][1], sections["usage"][2])
        if "access" in sections:
            access = self.bind_access(sections["access"][1])

        if None in (name, identification, metadata, usage, access):
            return None
        return ConnectorModel(
            name=name,
            identification=identification,
            metadata=metadata,
            usage=usage,
            access=access,
        )

    # --- binding ----------------------------------------------------------

    def bind_discovery(self, raw: _RawBlock) -> IdentificationData | None:
        b = _Binder(self, raw, "discovery")
        linked = b.string("linkedAssetId", nonempty=True)
        base_url = b.string("baseUrl")
        endpoint = b.string("endpoint")
        id_type = b.enum("identifierType", IdentifierType)
        b.finish()
        if not b.ok:
            return None
        return IdentificationData(linked, base_url, endpoint, id_type)

    def bind_metadata(self, raw: _RawBlock) -> AssetMetaData | None:
        b = _Binder(self, raw, "metadata")
        title = b.string("title", nonempty=True)
        description = b.string("description")
        publisher = b.string("publisher", nonempty=True)
        semantic_ids = b.string_list("semanticIds", required=False)
        version = b.string("version", nonempty=True)
        created = b.date_("created")
        modified = b.date_("modified")
        language = b.string("language", required=False)
        b.finish()
        if not b.ok:
            return None
        return AssetMetaData(
            title=title,
            description=description,
            publisher=publisher,
            version=version,
            created=created,
            modified=modified,
            semantic_ids=semantic_ids,
            language=language,
        )

    def bind_usage(self, raw: _RawBlock, variant: str | None) -> UsageConfig | None:
        if variant is None:
            return None
        b = _Binder(self, raw, f"{variant} usage", path="usage")
        data_address = b.string("dataAddress")
        schema_address = b.string("schemaAddress", required=False)

        extension: object = None
        if variant == "edc":
            edc_address = b.string("edcAddress")
            x_api_key = b.secret("xApiKey")
            remote_address = b.string("remoteAddress")
            remote_id = b.string("remoteId", nonempty=True)
            sts = b.string("stsServiceAddress", required=False)
            registries = b.string_list("trustedDidRegistries", required=False)
            push = None
            push_raw = b.block("push")
            if push_raw is not None:
                push = self.bind_push(push_raw)
                if push is None:
                    b.ok = False
            b.finish()
            if b.ok:
                extension = EdcUsage(
                    edc_address=edc_address,
                    x_api_key=x_api_key,
                    remote_address=remote_address,
                    remote_id=remote_id,
                    sts_service_address=sts,
                    trusted_did_registries=registries,
                    push_endpoints=push,
                )
        elif variant == "opcua":
            endpoint_url = b.string("endpointUrl")
            security_policy = b.enum("securityPolicy", SecurityPolicy)
            message_mode = b.enum("messageSecurityMode", MessageSecurityMode)
            auth_mode = b.enum("authenticationMode", AuthenticationMode)
            protocols = b.enum_list("protocols", Protocol, nonempty=True, unique=True)
            companion = b.string_list("companionSpecs", required=False)
            address_space = b.string("addressSpace")
            qos = None
            qos_raw = b.block("qos")
            if qos_raw is not None:
                qos = self.bind_qos(qos_raw)
                if qos is None:
                    b.ok = False
            b.finish()
            if b.ok:
                extension = OpcUaUsage(
                    endpoint_url=endpoint_url,
                    security_policy=security_policy,
                    message_security_mode=message_mode,
                    authentication_mode=auth_mode,
                    protocols=protocols,
                    address_space=address_space,
                    companion_specs=companion,
                    qos=qos,
                )
        else:
            b.finish()
            if b.ok:
                extension = PlainUsage()

        if extension is None or not b.ok:
            return None
        return UsageConfig(
            data_address=data_address, extension=extension, schema_address=schema_address
        )

    def bind_push(self, raw: _RawBlock) -> PushEndpointsConfig | None:
        self.smap.record("usage.push", raw.keyword_span)
        b = _Binder(self, raw, "push", path="usage.push")
        callback = b.string("callbackUrl")
        cloud = b.bool_("cloudPush")
        b.finish()
        if not b.ok:
            return None
        return PushEndpointsConfig(callback_url=callback, cloud_push=cloud)

    def bind_qos(self, raw: _RawBlock) -> QosMetrics | None:
        self.smap.record("usage.qos", raw.keyword_span)
        b = _Binder(self, raw, "qos", path="usage.qos")
        rate = b.int_("samplingRateMs", minimum=1)
        subs = b.int_("maxSubscriptions", minimum=1)
        b.finish()
        if not b.ok:
            return None
        return QosMetrics(sampling_rate_ms=rate, max_subscriptions=subs)

    def bind_access(self, raw: _RawBlock) -> AccessPolicy | None:
        b = _Binder(self, raw, "access")
        usage_policy = b.string("usagePolicy", nonempty=True)

        offers: dict[str, ContractValue] = {}
        contract_raw = b.block("contract")
        if contract_raw is not None:
            self.smap.record("access.contract", contract_raw.keyword_span)
            for key, key_span, scalar in contract_raw.contract:
                if scalar.kind is TokenKind.IDENT:
                    self.error(
                        "E014",
                        "contract values must be a string, integer, date, or boolean",
                        scalar.span,
                    )
                    b.ok = False
                    continue
                if scalar.value is None:
                    b.ok = False
                    continue
                offers[key] = scalar.value
                self.smap.record(f"access.contract.{key}", scalar.span)

        roles: list[Role] = []
        roles_raw = b.block("roles")
        if roles_raw is not None:
            self.smap.record("access.roles", roles_raw.keyword_span)
            for role_name, name_span, body in roles_raw.roles:
                role = self.bind_role(role_name, name_span, body)
                if role is None:
                    b.ok = False
                else:
                    roles.append(role)

        identity = None
        identity_raw = b.block("identity")
        if identity_raw is not None:
            self.smap.record("access.identity", identity_raw.keyword_span)
            identity = self.bind_identity(identity_raw)
            if identity is None:
                b.ok = False

        oauth = None
        oauth_raw = b.block("oauth")
        if oauth_raw is not None:
            self.smap.record("access.oauth", oauth_raw.keyword_span)
            oauth = self.bind_oauth(oauth_raw)
            if oauth is None:
                b.ok = False

        b.finish()
        if not b.ok:
            return None
        return AccessPolicy(
            usage_policy=usage_policy,
            contract_offers=offers,
            roles=tuple(roles),
            identity_provider=identity,
            oauth=oauth,
        )

    def bind_role(self, name: str, name_span: Span, raw: _RawBlock) -> Role | None:
        if not NAME_RE.fullmatch(name):
            self.error("E014", f"invalid role name {name!r}", name_span)
            return None
        path = f"access.roles[{name}]"
        self.smap.record(path, name_span)
        b = _Binder(self, raw, f"role {name}", path=path)
        permissions = b.enum_list("permissions", Permission, nonempty=False, unique=False)
        b.finish()
        if not b.ok:
            return None
        return Role(role_name=name, permissions=permissions)

    def bind_identity(self, raw: _RawBlock) -> IdentityProviderConfig | None:
        b = _Binder(self, raw, "identity", path="access.identity")
        endpoint = b.string("endpoint")
        client_id = b.string("clientId", nonempty=True)
        grant = b.enum("grantType", GrantType)
        secret = b.secret("secret")
        b.finish()
        if not b.ok:
            return None
        return IdentityProviderConfig(
            endpoint=endpoint, client_id=client_id, grant_type=grant, secret=secret
        )

    def bind_oauth(self, raw: _RawBlock) -> OAuthInfo | None:
        b = _Binder(self, raw, "oauth", path="access.oauth")
        identifier = b.string("identifier", nonempty=True)
        secret = b.secret("secret")
        grant = b.string("grantType")
        scope = b.string("scope")
        b.finish()
        if not b.ok:
            return None
        return OAuthInfo(identifier=identifier, secret=secret, grant_type=grant, scope=scope)


class _Binder:
    """Typed accessors over a raw block; every problem becomes a diagnostic."""

    def __init__(self, parser: _Parser, raw: _RawBlock, label: str, path: str | None = None) -> None:
        self.parser = parser
        self.raw = raw
        self.label = label
        self.path = path if path is not None else raw.label
        self.used_fields: set[str] = set()
        self.used_blocks: set[str] = set()
        self.ok = True

    def _take(self, key: str, required: bool) -> tuple[Span, _Value] | None:
        self.used_fields.add(key)
        entry = self.raw.fields.get(key)
        if entry is None:
            if required:
                self.parser.error(
                    "E011",
                    f"missing required field '{key}' in {self.label} block",
                    self.raw.keyword_span,
                )
                self.ok = False
            return None
        return entry

    def _fail(self, code: str, message: str, span: Span) -> None:
        self.parser.error(code, message, span)
        self.ok = False

    def _record(self, key: str, span: Span) -> None:
        self.parser.smap.record(f"{self.path}.{key}", span)

    def block(self, name: str) -> _RawBlock | None:
        self.used_blocks.add(name)
        return self.raw.blocks.get(name)

    def string(self, key: str, *, required: bool = True, nonempty: bool = False) -> str | None:
        entry = self._take(key, required)
        if entry is None:
            return None
        _, value = entry
        if not isinstance(value, _Scalar) or value.kind is not TokenKind.STRING:
            self._fail("E014", f"field '{key}' expects a quoted string", _value_span(value))
            return None
        text = str(value.value)
        if nonempty and not text:
            self._fail("E014", f"field '{key}' must be non-empty", value.span)
            return None
        self._record(key, value.span)
        return text

    def date_(self, key: str, *, required: bool = True) -> date | None:
        entry = self._take(key, required)
        if entry is None:
            return None
        _, value = entry
        if not isinstance(value, _Scalar) or value.kind is not TokenKind.DATE:
            self._fail("E014", f"field '{key}' expects a date (YYYY-MM-DD)", _value_span(value))
            return None
        if value.value is None:  # invalid calendar date, already reported
            self.ok = False
            return None
        self._record(key, value.span)
        return value.value

    def int_(self, key: str, *, required: bool = True, minimum: int | None = None) -> int | None:
        entry = self._take(key, required)
        if entry is None:
            return None
        _, value = entry
        if not isinstance(value, _Scalar) or value.kind is not TokenKind.INTEGER:
            self._fail("E014", f"field '{key}' expects an integer", _value_span(value))
            return None
        number = int(value.value)
        if minimum is not None and number < minimum:
            self._fail("E014", f"field '{key}' must be >= {minimum}", value.span)
            return None
        self._record(key, value.span)
        return number

    def bool_(self, key: str, *, required: bool = True) -> bool | None:
        entry = self._take(key, required)
        if entry is None:
            return None
        _, value = entry
        if not isinstance(value, _Scalar) or value.kind is not TokenKind.BOOLEAN:
            self._fail("E014", f"field '{key}' expects true or false", _value_span(value))
            return None
        self._record(key, value.span)
        return bool(value.value)

    def enum(self, key: str, enum_type: type[Enum], *, required: bool = True) -> Enum | None:
        entry = self._take(key, required)
        if entry is None:
            return None
        _, value = entry
        if not isinstance(value, _Scalar) or value.kind is not TokenKind.IDENT:
            self._fail(
                "E014",
                f"field '{key}' expects one of: {_enum_values(enum_type)}",
                _value_span(value),
            )
            return None
        try:
            member = enum_type(str(value.value))
        except ValueError:
            self._fail(
                "E014",
                f"invalid value '{value.value}' for field '{key}' "
                f"(expected one of: {_enum_values(enum_type)})",
                value.span,
            )
            return None
        self._record(key, value.span)
        return member

    def string_list(self, key: str, *, required: bool = True) -> tuple[str, ...] | None:
        entry = self._take(key, required)
        if entry is None:
            return None if required else ()
        _, value = entry
        if not isinstance(value, _List):
            self._fail("E014", f"field '{key}' expects a list of strings", _value_span(value))
            return None if required else ()
        items: list[str] = []
        bad = False
        for index, item in enumerate(value.items):
            if item.kind is not TokenKind.STRING:
                self._fail("E014", f"entries of '{key}' must be quoted strings", item.span)
                bad = True
                continue
            items.append(str(item.value))
            self.parser.smap.record(f"{self.path}.{key}[{index}]", item.span)
        if bad:
            return None if required else ()
        self._record(key, value.span)
        return tuple(items)

    def enum_list(
        self,
        key: str,
        enum_type: type[Enum],
        *,
        required: bool = True,
        nonempty: bool = False,
        unique: bool = False,
    ) -> tuple[Enum, ...] | None:
        entry = self._take(key, required)
        if entry is None:
            return None
        _, value = entry
        if not isinstance(value, _List):
            self._fail(
                "E014",
                f"field '{key}' expects a list of: {_enum_values(enum_type)}",
                _value_span(value),
            )
            return None
        members: list[Enum] = []
        bad = False
        for index, item in enumerate(value.items):
            if item.kind is not TokenKind.IDENT:
                self._fail(
                    "E014",
                    f"entries of '{key}' must be one of: {_enum_values(enum_type)}",
                    item.span,
                )
                bad = True
                continue
            try:
                member = enum_type(str(item.value))
            except ValueError:
                self._fail(
                    "E014",
                    f"invalid value '{item.value}' in '{key}' "
                    f"(expected one of: {_enum_values(enum_type)})",
                    item.span,
                )
                bad = True
                continue
            if unique and member in members:
                self._fail("E015", f"duplicate entry '{item.value}' in '{key}'", item.span)
                bad = True
                continue
            members.append(member)
            self.parser.smap.record(f"{self.path}.{key}[{index}]", item.span)
        if nonempty and not value.items:
            self._fail("E014", f"field '{key}' must not be empty", value.span)
            return None
        if bad:
            return None
        self._record(key, value.span)
        return tuple(members)

    def secret(self, key: str, *, required: bool = True) -> SecretLiteral | SecretEnvVar | None:
        entry = self._take(key, required)
        if entry is None:
            return None
        _, value = entry
        if isinstance(value, _EnvRef):
            self._record(key, value.span)
            return SecretEnvVar(value.name)
        if isinstance(value, _Scalar) and value.kind is TokenKind.STRING:
            self._record(key, value.span)
            return SecretLiteral(str(value.value))
        self._fail(
            "E014",
            f"field '{key}' expects a quoted string or env(NAME) reference",
            _value_span(value),
        )
        return None

    def finish(self) -> None:
        for key, (key_span, _) in self.raw.fields.items():
            if key not in self.used_fields:
                self._fail("E010", f"unknown field '{key}' in {self.label} block", key_span)
        for name, sub in self.raw.blocks.items():
            if name not in self.used_blocks:
                self._fail(
                    "E010", f"unknown block '{name}' in {self.label} block", sub.keyword_span
                )


def _value_span(value: _Value) -> Span:
    return value.span


def _enum_values(enum_type: type[Enum]) -> str:
    return ", ".join(member.value for member in enum_type)


def parse(source: str, file: str = "<input>") -> ParseResult:
    """Parse DSL text into a model; all problems are reported as diagnostics.

    The returned model is present exactly when no ERROR-severity diagnostic
    was produced.  Identical input always yields an identical result.
    """
    sink = _Sink()
    tokens = _lex(source, file, sink)
    parser = _Parser(tokens, file, sink)
    model: ConnectorModel | None = None
    if not sink.full:
        try:
            model = parser.parse_document()
        except _Abort:
            model = None
    if sink.has_errors:
        model = None
    diagnostics = sink.diagnostics
    # Binding reports in declaration order; present findings in source order.
    # A trailing E099 marks truncation and stays last.
    tail = []
    if diagnostics and diagnostics[-1].code == "E099":
        tail = [diagnostics[-1]]
        diagnostics = diagnostics[:-1]
    diagnostics = sorted(diagnostics, key=lambda d: d.span.sort_key()) + tail
    return ParseResult(model=model, diagnostics=diagnostics, source_map=parser.smap)
