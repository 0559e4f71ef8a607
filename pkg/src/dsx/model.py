"""Core model types for data-space connector descriptions.

A :class:`ConnectorModel` bundles everything one connector offering needs:
how the asset is identified and discovered, descriptive metadata, the
technical usage configuration (EDC, OPC UA, or plain ID-Link), and the
access policy (contract offers, roles, identity provider, OAuth).

All types are immutable after construction and safe to share between
threads.  Constructors enforce structural well-formedness only (types,
closed enums, printable single-line strings); semantic rules such as URL
schemes or date ordering are the validator's job, so models carrying such
defects remain constructible and printable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import Union

NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_-]*")
ENV_NAME_RE = re.compile(r"[A-Z][A-Z0-9_]*")


class IdentifierType(str, Enum):
    SIDI = "SIDI"
    URN = "URN"
    DID = "DID"
    CUSTOM = "CUSTOM"


class SecurityPolicy(str, Enum):
    NONE = "None"
    BASIC256_SHA256 = "Basic256Sha256"
    AES128_SHA256_RSA_OAEP = "Aes128Sha256RsaOaep"
    AES256_SHA256_RSA_PSS = "Aes256Sha256RsaPss"


class MessageSecurityMode(str, Enum):
    NONE = "None"
    SIGN = "Sign"
    SIGN_AND_ENCRYPT = "SignAndEncrypt"


class AuthenticationMode(str, Enum):
    ANONYMOUS = "Anonymous"
    USERNAME = "Username"
    TOKEN = "Token"
    CERTIFICATE = "Certificate"


class Protocol(str, Enum):
    OPC_TCP = "OPC_TCP"
    MQTT = "MQTT"
    HTTPS = "HTTPS"


class Permission(str, Enum):
    READ = "READ"
    WRITE = "WRITE"
    SUBSCRIBE = "SUBSCRIBE"
    EXECUTE = "EXECUTE"
    DELETE = "DELETE"


class GrantType(str, Enum):
    CLIENT_CREDENTIALS = "CLIENT_CREDENTIALS"
    AUTHORIZATION_CODE = "AUTHORIZATION_CODE"
    PASSWORD = "PASSWORD"


class Severity(str, Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


def _check_text(value: str, what: str, *, allow_empty: bool = True) -> None:
    """Reject strings the canonical printer cannot represent on one line."""
    if not isinstance(value, str):
        raise TypeError(f"{what} must be a string, got {type(value).__name__}")
    if not allow_empty and not value:
        raise ValueError(f"{what} must be non-empty")
    for ch in value:
        if ord(ch) < 0x20 or ch == "\x7f":
            raise ValueError(f"{what} must not contain control characters")


@dataclass(frozen=True)
class SecretLiteral:
    """Inline secret value, committed verbatim with the model."""

    value: str

    def __post_init__(self) -> None:
        _check_text(self.value, "secret literal")


@dataclass(frozen=True)
class SecretEnvVar:
    """Reference to an environment variable; generators emit ``${NAME}``."""

    name: str

    def __post_init__(self) -> None:
        if not ENV_NAME_RE.fullmatch(self.name):
            raise ValueError(f"invalid environment variable name: {self.name!r}")


SecretRef = Union[SecretLiteral, SecretEnvVar]


@dataclass(frozen=True)
class Span:
    """Half-open source region: 1-based line/column plus length in chars."""

    file: str
    line: int
    column: int
    length: int = 0

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1:
            raise ValueError("span line and column are 1-based")

    def sort_key(self) -> tuple[int, int]:
        return (self.line, self.column)


@dataclass(frozen=True)
class Diagnostic:
    """One parser/validator finding with a stable machine-readable code."""

    severity: Severity
    code: str
    message: str
    span: Span

    def render(self) -> str:
        return (
            f"{self.span.file}:{self.span.line}:{self.span.column}: "
            f"{self.severity.value.lower()}[{self.code}]: {self.message}"
        )


@dataclass(frozen=True)
class IdentificationData:
    linked_asset_id: str
    base_url: str
    endpoint: str
    identifier_type: IdentifierType

    def __post_init__(self) -> None:
        _check_text(self.linked_asset_id, "linkedAssetId", allow_empty=False)
        _check_text(self.base_url, "baseUrl")
        _check_text(self.endpoint, "endpoint")
        if not isinstance(self.identifier_type, IdentifierType):
            raise TypeError("identifierType must be an IdentifierType")


@dataclass(frozen=True)
class AssetMetaData:
    title: str
    description: str
    publisher: str
    version: str
    created: date
    modified: date
    semantic_ids: tuple[str, ...] = ()
    language: str | None = None

    def __post_init__(self) -> None:
        _check_text(self.title, "title", allow_empty=False)
        _check_text(self.description, "description")
        _check_text(self.publisher, "publisher", allow_empty=False)
        _check_text(self.version, "version", allow_empty=False)
        if not isinstance(self.created, date) or not isinstance(self.modified, date):
            raise TypeError("created and modified must be dates")
        for sid in self.semantic_ids:
            _check_text(sid, "semanticId")
        if self.language is not None:
            _check_text(self.language, "language")


@dataclass(frozen=True)
class PushEndpointsConfig:
    callback_url: str
    cloud_push: bool

    def __post_init__(self) -> None:
        _check_text(self.callback_url, "callbackUrl")
        if not isinstance(self.cloud_push, bool):
            raise TypeError("cloudPush must be a boolean")


@dataclass(frozen=True)
class EdcUsage:
    edc_address: str
    x_api_key: SecretRef
    remote_address: str
    remote_id: str
    sts_service_address: str | None = None
    trusted_did_registries: tuple[str, ...] = ()
    push_endpoints: PushEndpointsConfig | None = None

    def __post_init__(self) -> None:
        _check_text(self.edc_address, "edcAddress")
        _check_text(self.remote_address, "remoteAddress")
        _check_text(self.remote_id, "remoteId")
        if self.sts_service_address is not None:
            _check_text(self.sts_service_address, "stsServiceAddress")
        for url in self.trusted_did_registries:
            _check_text(url, "trustedDidRegistries entry")

    @property
    def direct_dsp(self) -> bool:
        """True when the model talks DSP directly instead of via a hosted EDC."""
        return self.sts_service_address is not None


@dataclass(frozen=True)
class QosMetrics:
    sampling_rate_ms: int
    max_subscriptions: int

    def __post_init__(self) -> None:
        if self.sampling_rate_ms <= 0 or self.max_subscriptions <= 0:
            raise ValueError("qos metrics must be positive")


@dataclass(frozen=True)
class OpcUaUsage:
    endpoint_url: str
    security_policy: SecurityPolicy
    message_security_mode: MessageSecurityMode
    authentication_mode: AuthenticationMode
    protocols: tuple[Protocol, ...]
    address_space: str
    companion_specs: tuple[str, ...] = ()
    qos: QosMetrics | None = None

    def __post_init__(self) -> None:
        _check_text(self.endpoint_url, "endpointUrl")
        _check_text(self.address_space, "addressSpace")
        if not self.protocols:
            raise ValueError("protocols must not be empty")
        if len(set(self.protocols)) != len(self.protocols):
            raise ValueError("protocols must not contain duplicates")
        for url in self.companion_specs:
            _check_text(url, "companionSpecs entry")


@dataclass(frozen=True)
class PlainUsage:
    """ID-Link connectors need nothing beyond the shared usage fields."""


UsageExtension = Union[EdcUsage, OpcUaUsage, PlainUsage]


@dataclass(frozen=True)
class UsageConfig:
    data_address: str
    extension: UsageExtension
    schema_address: str | None = None

    def __post_init__(self) -> None:
        _check_text(self.data_address, "dataAddress")
        if self.schema_address is not None:
            _check_text(self.schema_address, "schemaAddress")
        if not isinstance(self.extension, (EdcUsage, OpcUaUsage, PlainUsage)):
            raise TypeError("usage extension must be one of EdcUsage, OpcUaUsage, PlainUsage")


ContractValue = Union[str, int, bool, date]


@dataclass(frozen=True)
class Role:
    role_name: str
    permissions: tuple[Permission, ...]

    def __post_init__(self) -> None:
        if not NAME_RE.fullmatch(self.role_name):
            raise ValueError(f"invalid role name: {self.role_name!r}")
        # Emptiness and duplicates are validator findings (E205), not
        # construction errors, so defective models stay representable.


@dataclass(frozen=True)
class IdentityProviderConfig:
    endpoint: str
    client_id: str
    grant_type: GrantType
    secret: SecretRef

    def __post_init__(self) -> None:
        _check_text(self.endpoint, "identity endpoint")
        _check_text(self.client_id, "clientId", allow_empty=False)


@dataclass(frozen=True)
class OAuthInfo:
    identifier: str
    secret: SecretRef
    grant_type: str
    scope: str

    def __post_init__(self) -> None:
        _check_text(self.identifier, "oauth identifier", allow_empty=False)
        _check_text(self.grant_type, "oauth grantType")
        _check_text(self.scope, "oauth scope")


@dataclass(frozen=True)
class AccessPolicy:
    usage_policy: str
    contract_offers: dict[str, ContractValue] = field(default_factory=dict)
    roles: tuple[Role, ...] = ()
    identity_provider: IdentityProviderConfig | None = None
    oauth: OAuthInfo | None = None

    def __post_init__(self) -> None:
        _check_text(self.usage_policy, "usagePolicy", allow_empty=False)
        for key, value in self.contract_offers.items():
            _check_text(key, "contract key")
            if isinstance(value, str):
                _check_text(value, f"contract value for {key!r}")
            elif not isinstance(value, (bool, int, date)):
                raise TypeError(f"contract value for {key!r} must be a scalar")


@dataclass(frozen=True)
class ConnectorModel:
    name: str
    identification: IdentificationData
    metadata: AssetMetaData
    usage: UsageConfig
    access: AccessPolicy

    def __post_init__(self) -> None:
        if not NAME_RE.fullmatch(self.name):
            raise ValueError(f"invalid connector name: {self.name!r}")


def model_equals(a: ConnectorModel, b: ConnectorModel) -> bool:
    """Structural equality; contract-offer comparison ignores insertion order."""
    return a == b


def join_idlink(identification: IdentificationData) -> str:
    """Resolve the discoverable ID-Link URL for an identified asset.

    Joins base URL and endpoint with exactly one separating slash; for
    SIDI-typed assets the local identifier (serial number) is appended as
    a final path segment.
    """
    base = identification.base_url.rstrip("/")
    endpoint = identification.endpoint.strip("/")
    url = f"{base}/{endpoint}" if endpoint else base
    if identification.identifier_type is IdentifierType.SIDI:
        url = f"{url}/{identification.linked_asset_id}"
    return url


_INDENT = "  "


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _scalar(value: ContractValue) -> str:
    # bool first: bool is a subclass of int.
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, date):
        return value.isoformat()
    return _quote(value)


def _secret(ref: SecretRef) -> str:
    if isinstance(ref, SecretEnvVar):
        return f"env({ref.name})"
    return _quote(ref.value)


def _string_list(items: tuple[str, ...]) -> str:
    return "[" + ", ".join(_quote(item) for item in items) + "]"


class _Writer:
    def __init__(self) -> None:
        self.lines: list[str] = []
        self.level = 0

    def line(self, text: str) -> None:
        self.lines.append(_INDENT * self.level + text)

    def open(self, header: str) -> None:
        self.line(header + " {")
        self.level += 1

    def close(self) -> None:
        self.level -= 1
        self.line("}")


def print_canonical(model: ConnectorModel) -> str:
    """Render a model as canonical DSL text.

    The output is deterministic: fixed section and field order, 2-space
    indentation, LF line endings, contract offers sorted by key, and a
    trailing newline.  Parsing the output reproduces the model.
    """
    w = _Writer()
    w.open(f"connector {_quote(model.name)}")
    _print_discovery(w, model.identification)
    _print_metadata(w, model.metadata)
    _print_usage(w, model.usage)
    _print_access(w, model.access)
    w.close()
    return "\n".join(w.lines) + "\n"


def _print_discovery(w: _Writer, ident: IdentificationData) -> None:
    w.open("discovery")
    w.line(f"linkedAssetId: {_quote(ident.linked_asset_id)}")
    w.line(f"baseUrl: {_quote(ident.base_url)}")
    w.line(f"endpoint: {_quote(ident.endpoint)}")
    w.line(f"identifierType: {ident.identifier_type.value}")
    w.close()


def _print_metadata(w: _Writer, meta: AssetMetaData) -> None:
    w.open("metadata")
    w.line(f"title: {_quote(meta.title)}")
    w.line(f"description: {_quote(meta.description)}")
    w.line(f"publisher: {_quote(meta.publisher)}")
    if meta.semantic_ids:
        w.line(f"semanticIds: {_string_list(meta.semantic_ids)}")
    w.line(f"version: {_quote(meta.version)}")
    w.line(f"created: {meta.created.isoformat()}")
    w.line(f"modified: {meta.modified.isoformat()}")
    if meta.language is not None:
        w.line(f"language: {_quote(meta.language)}")
    w.close()


def _print_usage(w: _Writer, usage: UsageConfig) -> None:
    ext = usage.extension
    if isinstance(ext, EdcUsage):
        variant = "edc"
    elif isinstance(ext, OpcUaUsage):
        variant = "opcua"
    else:
        variant = "plain"
    w.open(f"usage {variant}")
    w.line(f"dataAddress: {_quote(usage.data_address)}")
    if usage.schema_address is not None:
        w.line(f"schemaAddress: {_quote(usage.schema_address)}")
    if isinstance(ext, EdcUsage):
        w.line(f"edcAddress: {_quote(ext.edc_address)}")
        w.line(f"xApiKey: {_secret(ext.x_api_key)}")
        w.line(f"remoteAddress: {_quote(ext.remote_address)}")
        w.line(f"remoteId: {_quote(ext.remote_id)}")
        if ext.sts_service_address is not None:
            w.line(f"stsServiceAddress: {_quote(ext.sts_service_address)}")
        if ext.trusted_did_registries:
            w.line(f"trustedDidRegistries: {_string_list(ext.trusted_did_registries)}")
        if ext.push_endpoints is not None:
            w.open("push")
            w.line(f"callbackUrl: {_quote(ext.push_endpoints.callback_url)}")
            w.line(f"cloudPush: {'true' if ext.push_endpoints.cloud_push else 'false'}")
            w.close()
    elif isinstance(ext, OpcUaUsage):
        w.line(f"endpointUrl: {_quote(ext.endpoint_url)}")
        w.line(f"securityPolicy: {ext.security_policy.value}")
        w.line(f"messageSecurityMode: {ext.message_security_mode.value}")
        w.line(f"authenticationMode: {ext.authentication_mode.value}")
        w.line("protocols: [" + ", ".join(p.value for p in ext.protocols) + "]")
        if ext.companion_specs:
            w.line(f"companionSpecs: {_string_list(ext.companion_specs)}")
        w.line(f"addressSpace: {_quote(ext.address_space)}")
        if ext.qos is not None:
            w.open("qos")
            w.line(f"samplingRateMs: {ext.qos.sampling_rate_ms}")
            w.line(f"maxSubscriptions: {ext.qos.max_subscriptions}")
            w.close()
    w.close()


def _print_access(w: _Writer, access: AccessPolicy) -> None:
    w.open("access")
    w.line(f"usagePolicy: {_quote(access.usage_policy)}")
    if access.contract_offers:
        w.open("contract")
        for key in sorted(access.contract_offers):
            w.line(f"{_quote(key)}: {_scalar(access.contract_offers[key])},")
        w.close()
    if access.roles:
        w.open("roles")
        for role in access.roles:
            w.open(f"role {role.role_name}")
            w.line("permissions: [" + ", ".join(p.value for p in role.permissions) + "]")
            w.close()
        w.close()
    if access.identity_provider is not None:
        idp = access.identity_provider
        w.open("identity")
        w.line(f"endpoint: {_quote(idp.endpoint)}")
        w.line(f"clientId: {_quote(idp.client_id)}")
        w.line(f"grantType: {idp.grant_type.value}")
        w.line(f"secret: {_secret(idp.secret)}")
        w.close()
    if access.oauth is not None:
        oauth = access.oauth
        w.open("oauth")
        w.line(f"identifier: {_quote(oauth.identifier)}")
        w.line(f"secret: {_secret(oauth.secret)}")
        w.line(f"grantType: {_quote(oauth.grant_type)}")
        w.line(f"scope: {_quote(oauth.scope)}")
        w.close()
    w.close()
