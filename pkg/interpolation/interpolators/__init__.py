"""
Spatial interpolators behind one fit/predict contract.

    model = fit(InterpolatorConfig.default_rbf(), train)
    values = predict(model, queries)
"""
from .config import (
    GbtParams, IdwParams, InterpolatorConfig, Method, MriParams, OkParams, RbfParams, RfParams,
    TransmitterSite, load_methods, parse_method,
)
from .idw import idw_weights
from .kriging import EmpiricalVariogram, VariogramModel, empirical_variogram, fit_variogram
from .mri import PathLossFit, fit_mri
from .rbf import rbf_solve
from .registry import extrapolation_mask, fit, predict
from .training import TrainingSet, deduplicate
from .trees import fit_tree_ensemble

__all__ = [
    'EmpiricalVariogram', 'GbtParams', 'IdwParams', 'InterpolatorConfig', 'Method', 'MriParams',
    'OkParams', 'PathLossFit', 'RbfParams', 'RfParams', 'TrainingSet', 'TransmitterSite',
    'VariogramModel', 'deduplicate', 'empirical_variogram', 'extrapolation_mask', 'fit',
    'fit_mri', 'fit_tree_ensemble', 'fit_variogram', 'idw_weights', 'load_methods',
    'parse_method', 'predict', 'rbf_solve',
]
