"""Vorticity-relation diagnostics for capillary and general complex fluids."""

from . import crocco, fieldcalc, fieldio, manufactured, models, smectic, transport

__all__ = ["crocco", "fieldcalc", "fieldio", "manufactured", "models", "smectic", "transport"]
__version__ = "0.1.0"
