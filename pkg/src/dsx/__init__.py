"""dsx: a compiler toolchain for data-space connector descriptions.

``.dsx`` files declare how one asset is discovered, described, used, and
access-controlled in a federated data space.  This package parses and
validates such models and generates deployable configuration for EDC,
OPC UA, and ID-Link/AAS targets.
"""

from .codegen import (
    GeneratedArtifact,
    GenerationBundle,
    GenerationError,
    PROTOCOL_WIRE_NAMES,
    Target,
    generate_all,
    generate_edc,
    generate_idlink_aas,
    generate_opcua,
    schema_path_for,
)
from .model import (
    AccessPolicy,
    AssetMetaData,
    AuthenticationMode,
    ConnectorModel,
    Diagnostic,
    EdcUsage,
    GrantType,
    IdentificationData,
    IdentifierType,
    IdentityProviderConfig,
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
    SecretRef,
    SecurityPolicy,
    Severity,
    Span,
    UsageConfig,
    join_idlink,
    model_equals,
    print_canonical,
)
from .parser import ParseResult, SourceMap, Token, TokenKind, parse, tokenize
from .validator import ValidationReport, check_single, validate

__version__ = "0.1.0"

__all__ = [
    "AccessPolicy",
    "AssetMetaData",
    "AuthenticationMode",
    "ConnectorModel",
    "Diagnostic",
    "EdcUsage",
    "GeneratedArtifact",
    "GenerationBundle",
    "GenerationError",
    "GrantType",
    "IdentificationData",
    "IdentifierType",
    "IdentityProviderConfig",
    "MessageSecurityMode",
    "OAuthInfo",
    "OpcUaUsage",
    "ParseResult",
    "Permission",
    "PlainUsage",
    "PROTOCOL_WIRE_NAMES",
    "Protocol",
    "PushEndpointsConfig",
    "QosMetrics",
    "Role",
    "SecretEnvVar",
    "SecretLiteral",
    "SecretRef",
    "SecurityPolicy",
    "Severity",
    "SourceMap",
    "Span",
    "Target",
    "Token",
    "TokenKind",
    "UsageConfig",
    "ValidationReport",
    "check_single",
    "generate_all",
    "generate_edc",
    "generate_idlink_aas",
    "generate_opcua",
    "join_idlink",
    "model_equals",
    "parse",
    "print_canonical",
    "schema_path_for",
    "tokenize",
    "validate",
]
