"""Hot-loop kernels with a numba and a pure-numpy implementation.

``ACTIVE_BACKEND`` records which one PARAFLOW_BACKEND selected.
"""

from __future__ import annotations

from paraflow._backend import resolve_backend

ACTIVE_BACKEND = resolve_backend()

if ACTIVE_BACKEND == "numba":
    from paraflow._kernels.numba_impl import (
        build_tree,
        cluster_dist_sums,
        forest_path_sums,
        kmeans_assign,
        kmeans_update,
        rolling_core,
        smo_solve,
    )
else:
    from paraflow._kernels.numpy_impl import (
        build_tree,
        cluster_dist_sums,
        forest_path_sums,
        kmeans_assign,
        kmeans_update,
        rolling_core,
        smo_solve,
    )

__all__ = [
    "ACTIVE_BACKEND",
    "build_tree",
    "cluster_dist_sums",
    "forest_path_sums",
    "kmeans_assign",
    "kmeans_update",
    "rolling_core",
    "smo_solve",
]
