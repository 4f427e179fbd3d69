"""scikit-learn style wrappers around the reach and hull analyses.

``X`` is a :class:`~reachkit.grid.GridSet`, or a boolean occupancy array
together with the ``spacing``/``origin`` parameters.  These are set-valued
analyses, so there is no ``y`` and no ``predict``; ``fit`` stores the report
and :class:`RHull` additionally ``transform``s a set into its closing.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from reachkit.errors import DomainError
from reachkit.grid import Adjacency, GridSet, GridSpec
from reachkit.reach import certify_reach, unp_reach_estimate
from reachkit.rhull import admits_rhull, closing

__all__ = ["RHull", "ReachCertifier", "ReachEstimator", "check_gridset"]


def check_gridset(X, spacing=None, origin=None) -> GridSet:
    """Coerce ``X`` to a non-empty 2-D or 3-D :class:`GridSet`."""
    if isinstance(X, GridSet):
        g = X
    else:
        occ = np.asarray(X)
        if occ.ndim not in (2, 3):
            raise DomainError(f"occupancy must be a 2-D or 3-D array, got shape {occ.shape}")
        if occ.dtype != bool:
            if not np.all((occ == 0) | (occ == 1)):
                raise DomainError("occupancy must be boolean or 0/1")
            occ = occ.astype(bool)
        h = 1.0 if spacing is None else spacing
        org = (0.0,) * occ.ndim if origin is None else tuple(origin)
        g = GridSet(GridSpec(org, h, occ.shape), occ)
    if g.is_empty:
        raise DomainError("the set is empty")
    return g


class _GridEstimator(BaseEstimator):
    def _grid(self, X):
        return check_gridset(X, getattr(self, "spacing", None), getattr(self, "origin", None))


class ReachEstimator(_GridEstimator):
    """Estimate reach from cells with two well-separated nearest points."""

    def __init__(self, R_max=1.0, foot_tol=None, sep_tol=None, spacing=None, origin=None):
        self.R_max = R_max
        self.foot_tol = foot_tol
        self.sep_tol = sep_tol
        self.spacing = spacing
        self.origin = origin

    def fit(self, X, y=None):
        self.report_ = unp_reach_estimate(self._grid(X), self.R_max, self.foot_tol, self.sep_tol)
        self.reach_ = self.report_.reach_estimate
        return self


class ReachCertifier(_GridEstimator):
    """Certify ``reach >= R`` or find a violating pair."""

    def __init__(self, R=1.0, adjacency="full", pair_budget=None, seed=0, spacing=None, origin=None):
        self.R = R
        self.adjacency = adjacency
        self.pair_budget = pair_budget
        self.seed = seed
        self.spacing = spacing
        self.origin = origin

    def fit(self, X, y=None):
        self.verdict_ = certify_reach(self._grid(X), self.R, Adjacency.parse(self.adjacency),
                                      self.pair_budget, self.seed)
        self.certified_ = self.verdict_.certified
        return self


class RHull(_GridEstimator, TransformerMixin):
    """Decide whether the fitted set has an R-hull; ``transform`` returns closings."""

    def __init__(self, R=1.0, adjacency="full", pair_budget=None, seed=0, spacing=None, origin=None):
        self.R = R
        self.adjacency = adjacency
        self.pair_budget = pair_budget
        self.seed = seed
        self.spacing = spacing
        self.origin = origin

    def fit(self, X, y=None):
        self.report_ = admits_rhull(self._grid(X), self.R, Adjacency.parse(self.adjacency),
                                    self.pair_budget, self.seed)
        self.admits_ = self.report_.admits
        return self

    def transform(self, X):
        check_is_fitted(self, "report_")
        g = self._grid(X)
        out = closing(g, self.R)
        return out if isinstance(X, GridSet) else out.occupancy.copy()
