"""Exact SO(3) quantum representations of genus-0 blocks at odd roots of unity."""

from __future__ import annotations

__version__ = "0.1.0"
