from .enumerative_client import EnumerativeSynthesizer
from .smt_client import BaseSmtClient, SmtSolverClient, Z3Client
from .sygus_client import SygusSolverClient

__all__ = [
    "BaseSmtClient",
    "EnumerativeSynthesizer",
    "SmtSolverClient",
    "SygusSolverClient",
    "Z3Client",
]
