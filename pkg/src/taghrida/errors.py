"""Exception types shared across the toolkit."""


class TaghridaError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(TaghridaError):
    """Input file does not have the expected shape (columns, fields)."""


class DataError(TaghridaError):
    """Input file content is malformed (bad labels, encoding, markers)."""
