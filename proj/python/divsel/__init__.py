"""Embedding-based diverse sample selection: farthest-point sampling, k-means
cluster-balanced selection, an MLP autoencoder embedder, and the iterative
balancing pipeline, all deterministic given explicit seeds."""

from divsel._divsel import *  # noqa: F401,F403
from divsel._divsel import __doc__  # noqa: F401
