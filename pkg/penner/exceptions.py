"""
Engine exception hierarchy and the error envelope used by reports.
"""
import logging
from typing import Any

logger = logging.getLogger(__name__)


class PennerError(Exception):
    """
    Base class for every domain failure raised by the engine.

    Args:
        message: Human readable description naming the violated precondition
        code: Machine readable error code
        details: Optional JSON-safe context
    """

    module = "penner"
    default_code = "error"

    def __init__(self, message: str, code: str | None = None, details: Any = None):
        super().__init__(message)
        self.message = message
        self.code = code or self.default_code
        self.details = details


class PlumbingError(PennerError):
    module = "plumbing"
    default_code = "invalid_graph"


class TwistError(PennerError):
    module = "twistsys"
    default_code = "invalid_word"


class WordSyntaxError(TwistError):
    default_code = "syntax_error"


class UnknownSphereError(TwistError):
    default_code = "unknown_sphere"


class NotPennerError(TwistError):
    default_code = "not_penner"


class DecompositionError(PennerError):
    module = "diskdecomp"
    default_code = "invalid_decomposition"


class TransferError(PennerError):
    module = "transfer"
    default_code = "invalid_matrix"


class DomainMismatchError(TransferError):
    default_code = "domain_mismatch"


class LimitsError(PennerError):
    module = "limits"
    default_code = "invalid_strand"


class SpinningFallback(LimitsError):
    default_code = "spinning_fallback"


class SurfaceError(PennerError):
    module = "surface"
    default_code = "invalid_curve"


class GeomlabError(PennerError):
    module = "geomlab"
    default_code = "invalid_point"


class LamsolveError(PennerError):
    module = "lamsolve"
    default_code = "invalid_boundary"


class InfeasibleConstraintError(LamsolveError):
    default_code = "infeasible"


class CliError(PennerError):
    module = "cli"
    default_code = "usage_error"


def error_payload(exc: BaseException) -> dict[str, Any]:
    """
    Build the error envelope for an exception and log it by severity.

    Domain failures are logged as warnings; anything else is treated as an
    internal error and logged with its traceback.
    """
    if isinstance(exc, PennerError):
        payload = {
            'success': False,
            'error': {
                'module': exc.module,
                'code': exc.code,
                'message': exc.message,
                'details': exc.details,
            }
        }
        logger.warning(
            f"[{exc.module}] {exc.code}: {exc.message}",
            extra={'module_tag': exc.module, 'error_code': exc.code},
        )
        return payload

    logger.error(f"Internal error: {exc}", exc_info=exc)
    return {
        'success': False,
        'error': {
            'module': 'penner',
            'code': 'internal_error',
            'message': str(exc) or exc.__class__.__name__,
            'details': None,
        }
    }
