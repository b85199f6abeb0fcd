"""Exception types shared across the package."""


class ClinrelError(Exception):
    """Base class for all domain errors raised by this package."""


class FvecFormatError(ClinrelError):
    """Feature file violates the FVEC binary format."""


class ManifestError(ClinrelError):
    """Registry manifest is structurally invalid."""


class MissingRoleError(ClinrelError):
    """Registry lacks an entry required for a comparison or experiment."""
