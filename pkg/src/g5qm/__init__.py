"""Five-dimensional Galilei-covariant non-relativistic quantum mechanics.

Modules
-------
group5      homogeneous 5D Galilei group, quadratic form, boost phase
geometry5   non-inertial frames: G5' map, metric, connection, fuenfbein
clifford    degenerate-metric gamma matrices and the two-component reduction
dynamics    spectral Strang-split evolution of scalar and Pauli states
covariance  frame changes of states and the covariance experiments
cli         the ``g5`` command
"""
__version__ = "0.1.0"
