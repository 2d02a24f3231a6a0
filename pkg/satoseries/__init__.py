"""Ramanujan-Sato series reconstruction and certification library.

The package does not import Django; the ``satoCertify`` app wraps it with
management commands and reporting.
"""

from pathlib import Path

__version__ = "0.1.0"

CATALOG_DIR = Path(__file__).resolve().parent / "catalog"
