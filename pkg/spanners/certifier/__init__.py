from .certify import certify
from .config import CertConfig
from .report import CertReport

__all__ = ["CertConfig", "CertReport", "certify"]
