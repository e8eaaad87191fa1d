"""Exception hierarchy for the tokenlab package.

Everything raised by library code derives from TokenlabError so the CLI can
map analysis failures to a single nonzero exit path.
"""


class TokenlabError(Exception):
    """Base class for all tokenlab errors."""


class ValidationError(TokenlabError):
    """A record or argument violates a domain invariant."""


class SchemaError(TokenlabError):
    """An input file does not match its documented schema."""


class InsufficientDataError(TokenlabError):
    """An estimator was handed fewer observations than it requires."""


class SingularDesignError(TokenlabError):
    """A regression design matrix is rank deficient."""


class InfeasibleCandidateError(TokenlabError):
    """A break candidate leaves a segment below the minimum size."""


class SolverError(TokenlabError):
    """The linear-program solver failed to produce a valid optimum."""


class CatalogError(TokenlabError):
    """Catalog ingestion failed."""


class CredentialError(CatalogError):
    """The catalog endpoint rejected the supplied credential."""


class PayloadError(CatalogError):
    """The catalog payload is malformed; the message names the field."""
