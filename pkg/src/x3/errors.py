"""Exception types shared by the codec and the command line front end."""


class X3Error(Exception):
    """Base class for all errors raised by this package."""


class CorruptStreamError(X3Error):
    """The compressed input is truncated, tampered with, or otherwise invalid."""


class FormatError(CorruptStreamError):
    """Bad magic bytes or an unsupported container version."""


class DictionaryCapError(X3Error):
    """Input needs more dictionary entries than the coder precision allows."""
