"""Graph hot loops: compiled Cython core with a pure-Python fallback.

The compiled module is used when it was built and importable, unless the
environment variable ``PAULIPART_PURE_PYTHON`` is set to a non-empty value.
``BACKEND`` names the implementation in use.
"""

import os

from . import _pykernels as python_backend

compiled_backend = None
if not os.environ.get("PAULIPART_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_active = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

adjacency = _active.adjacency
greedy_cover = _active.greedy_cover
max_clique = _active.max_clique

words_for = python_backend.words_for
pack_bool_rows = python_backend.pack_bool_rows
row_to_int = python_backend.row_to_int
int_to_row = python_backend.int_to_row
