"""
Data models package.
Contains scene file schemas and report structures.
"""
