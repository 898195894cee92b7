"""
Chern-Weil Layer Package
========================
This package contains Chern forms, Bott difference forms and localized Chern cocycles.

Exports:
    ChernWeilService: Main service class for the chernweil layer
    chern_form: c^q of a connection on every chart it reaches
    bott_difference: Bott difference form of two connections
    fibre_integrate: Integration along the [0, 1] fibre of chart x [0, 1]
"""

from .chern import bott_difference, chern_form, fibre_integrate
from .chernweil_service import ChernWeilService

__all__ = [
    "ChernWeilService",
    "chern_form",
    "bott_difference",
    "fibre_integrate",
]
