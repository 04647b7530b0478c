"""
Standardized report envelopes.
"""
from typing import Any, Dict, Optional


def success_envelope(
    data: Any = None,
    message: Optional[str] = None,
    meta: Optional[Dict] = None,
) -> Dict[str, Any]:
    """
    Wrap a report in the success envelope.

    Usage:
        return success_envelope(
            data={'choice': {'p': '+'}},
            meta={'command': 'track invariant'},
        )
    """
    envelope = {
        'success': True,
        'data': data,
    }

    if message:
        envelope['message'] = message

    if meta:
        envelope['meta'] = meta

    return envelope


def error_envelope(
    message: str,
    code: str = 'error',
    module: str = 'cli',
    errors: Optional[Dict] = None,
) -> Dict[str, Any]:
    """Wrap a validation failure (no exception object) in the error envelope."""
    envelope = {
        'success': False,
        'error': {
            'module': module,
            'code': code,
            'message': message,
            'details': None,
        }
    }

    if errors:
        envelope['error']['errors'] = errors

    return envelope
