"""Symbolic-numeric checks for the cochain calculus of flat torsion-free
connections on coordinate boxes.

The package builds exact symbolic expressions, differentiates them, and
then verifies identities by sampling residuals at random chart points, so
every claim is backed by a reported max residual instead of trust in the
algebra.
"""
from .chart import Chart, ChartError
from .connection import (
    Connection,
    average,
    codazzi_probe,
    conjugate,
    cov_deriv_oneform,
    cov_deriv_tensor02,
    cov_deriv_vf,
    curvature_tensor_comps,
    differential,
    flat_connection,
    flatness_probe,
    grad,
    hessian,
    laplacian,
    levi_civita,
    metric_compat_probe,
    torsion_probe,
)
from .expr import DomainError, Expr, ExprError
from .fields import (
    BilinearVVField,
    EqualityReport,
    FieldError,
    MetricField,
    OneForm,
    ProbeConfig,
    TensorField02,
    VectorField,
    fields_equal_probe,
    lie_bracket,
)
from .kv import (
    Cochain,
    ContextError,
    KVContext,
    KVError,
    ad_cochain,
    cochains_equal_probe,
    cochain_zero_probe,
    conformal_cochain,
    conn_diff_cochain,
    connection_cochain,
    curvature_cochain,
    d2_probe,
    d_kv,
    dual_projective_cochain,
    identity_cochain,
    jacobi_probe,
    projective_cochain,
    scalar_cochain,
    symmetry_probe,
    tensor_cochain,
    tensoriality_probe,
    vector_cochain,
)
from .parse import ParseError, parse

__version__ = "0.1.0"

__all__ = [
    "Chart", "ChartError",
    "Connection", "average", "codazzi_probe", "conjugate",
    "cov_deriv_oneform", "cov_deriv_tensor02", "cov_deriv_vf",
    "curvature_tensor_comps", "differential", "flat_connection",
    "flatness_probe", "grad", "hessian", "laplacian", "levi_civita",
    "metric_compat_probe", "torsion_probe",
    "DomainError", "Expr", "ExprError",
    "BilinearVVField", "EqualityReport", "FieldError", "MetricField",
    "OneForm", "ProbeConfig", "TensorField02", "VectorField",
    "fields_equal_probe", "lie_bracket",
    "Cochain", "ContextError", "KVContext", "KVError", "ad_cochain",
    "cochains_equal_probe", "cochain_zero_probe", "conformal_cochain",
    "conn_diff_cochain", "connection_cochain", "curvature_cochain",
    "d2_probe", "d_kv", "dual_projective_cochain", "identity_cochain",
    "jacobi_probe", "projective_cochain", "scalar_cochain",
    "symmetry_probe", "tensor_cochain", "tensoriality_probe",
    "vector_cochain",
    "ParseError", "parse",
    "__version__",
]
