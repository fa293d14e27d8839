"""mcflab: a desk-scale laboratory for mean curvature flow singularities
modeled on conical self-shrinkers (doubling, Gaussian spectral theory,
rescaled graph flow, barriers, and Wazewski-box shooting)."""

__version__ = "0.1.0"
