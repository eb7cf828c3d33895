"""
格化全K理论计算内核
"""

from .errors import (
    BudgetExceededError, DimensionMismatchError, InvalidSpecError, LatticedKError, LayerClosureError,
    MalformedStructureError, NonComposableError, ProvenanceMissingError,
)
from .zmodule import AbHom, FgAbGroup, IntegerMatrix, smith_normal_form
from .lambda_module import CoefficientSet, LambdaModule, LambdaMorphism, standard_lambda_module
from .latticed import LatticedKModule, Scale, VElem, validate_latticed_module
from .vmorphism import VMorphism, iso_search_latticed

__version__ = "1.0.0"

__all__ = [
    'LatticedKError',
    'BudgetExceededError',
    'DimensionMismatchError',
    'InvalidSpecError',
    'LayerClosureError',
    'MalformedStructureError',
    'NonComposableError',
    'ProvenanceMissingError',
    'AbHom',
    'FgAbGroup',
    'IntegerMatrix',
    'smith_normal_form',
    'CoefficientSet',
    'LambdaModule',
    'LambdaMorphism',
    'standard_lambda_module',
    'LatticedKModule',
    'Scale',
    'VElem',
    'validate_latticed_module',
    'VMorphism',
    'iso_search_latticed',
]
