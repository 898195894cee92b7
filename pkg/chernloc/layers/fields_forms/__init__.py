"""
Fields & Forms Layer Package
============================
This package contains the symbolic exterior calculus.

Exports:
    FieldsFormsService: Main service class for fields and forms
    Form: Exterior form on one chart
    SceneForm: Form given chart-wise over a scene
    ChartMap: Map between charts, used by pullback
    TangentVector: Tangent vector for form evaluation
"""

from .fields_forms_service import FieldsFormsService
from .form import ChartMap, Form, SceneForm, TangentVector

__all__ = [
    "FieldsFormsService",
    "Form",
    "SceneForm",
    "ChartMap",
    "TangentVector",
]
