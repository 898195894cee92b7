"""
Layers package initialization.
Contains all computation layers, from forms up to reports.
"""
