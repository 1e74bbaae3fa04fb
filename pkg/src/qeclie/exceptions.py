"""Exception types shared across the package."""


class CapabilityError(RuntimeError):
    """A request exceeds a documented size cap (dense-path limits)."""


class SupportOverlapError(ValueError):
    """Error images of the two codewords overlap; gate construction is unsound."""


class CodeFileError(ValueError):
    """A code file violates the JSON schema or fails validation."""
