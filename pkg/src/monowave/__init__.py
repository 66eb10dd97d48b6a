"""Monochromatic waves on R^m, Gaussian comparison fields, and nodal statistics.

The library is organized around the pipeline: direction sets on the sphere
(directions) -> hyperspherical partitions (partition) -> deterministic wave
evaluation and kernels (field) -> Gaussian comparison fields (gaussian) ->
grid sampling (grid) -> nodal decompositions, trees, topology (nodal) ->
growth and anti-concentration statistics (growth) -> estimator-vs-prediction
reports (stats) -> command line driver (cli).
"""

__version__ = "0.1.0"
