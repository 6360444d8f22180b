"""
Read the SPANLAB settings dict.

Only commands and tasks call these; the library takes explicit arguments.
"""

from typing import Any

from django.conf import settings

DEFAULTS: dict[str, Any] = {
    "DEFAULT_SEED": 0,
    "BUILD_GUARDRAIL_N": 4096,
    "CERT_G": 33.0,
    "CERT_S": 400.0,
    "C_SEARCH_LOW": 1.0,
    "C_SEARCH_HIGH": 2.0**40,
    "C_SEARCH_DIGITS": 3,
}


def spanlab_setting(key: str) -> Any:
    return getattr(settings, "SPANLAB", {}).get(key, DEFAULTS[key])


def cert_options(**overrides: Any) -> dict[str, Any]:
    """CertConfig keyword arguments from settings, with ``overrides`` on top."""
    options = {
        "g": float(spanlab_setting("CERT_G")),
        "s": float(spanlab_setting("CERT_S")),
        "c_low": float(spanlab_setting("C_SEARCH_LOW")),
        "c_high": float(spanlab_setting("C_SEARCH_HIGH")),
        "c_digits": int(spanlab_setting("C_SEARCH_DIGITS")),
    }
    options.update({k: v for k, v in overrides.items() if v is not None})
    return options
