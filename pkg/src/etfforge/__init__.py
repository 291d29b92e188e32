"""Equiangular tight frames from relative difference sets and mutually unbiased ETFs."""

from __future__ import annotations

from .construct import (
    EtfParams,
    KlsType,
    abs_gram_multiset,
    consistency_check,
    gmw_check,
    kls_params,
    kls_types,
    main_result_construct,
    main_result_params,
    pos_neg_enumerate,
    tensor_checks,
    tensor_etf,
)
from .errors import DomainError
from .field import FieldElement, FiniteField, finite_field, is_prime_power
from .fixtures import load_fixture
from .frames import (
    EtfCertificate,
    Frame,
    certify,
    export_frame,
    gram,
    harmonic_frame,
    import_frame,
    naimark_complement,
    welch_bound_sq,
)
from .groups import AbelianGroup, Subgroup, annihilator, quotient_group, transversal
from .muetf import (
    MuetfBundle,
    export_bundle,
    flat_muetf_bound,
    gerzon_muetf_bound,
    harmonic_muetf,
    import_bundle,
    singer_muetf,
    verify_muetf,
)
from .rds import RdsSpec, load_rds, quadratic_rds, quotient_rds, singer_rds, verify_rds

__version__ = "0.1.0"

__all__ = [
    "AbelianGroup",
    "DomainError",
    "EtfCertificate",
    "EtfParams",
    "FieldElement",
    "FiniteField",
    "Frame",
    "KlsType",
    "MuetfBundle",
    "RdsSpec",
    "Subgroup",
    "abs_gram_multiset",
    "annihilator",
    "annotations",
    "certify",
    "consistency_check",
    "export_bundle",
    "export_frame",
    "finite_field",
    "flat_muetf_bound",
    "gerzon_muetf_bound",
    "gmw_check",
    "gram",
    "harmonic_frame",
    "harmonic_muetf",
    "import_bundle",
    "import_frame",
    "is_prime_power",
    "kls_params",
    "kls_types",
    "load_fixture",
    "load_rds",
    "main_result_construct",
    "main_result_params",
    "naimark_complement",
    "pos_neg_enumerate",
    "quadratic_rds",
    "quotient_group",
    "quotient_rds",
    "singer_muetf",
    "singer_rds",
    "tensor_checks",
    "tensor_etf",
    "transversal",
    "verify_muetf",
    "verify_rds",
    "welch_bound_sq",
]
