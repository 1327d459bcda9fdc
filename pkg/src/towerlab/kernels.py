"""Kernel selection: compiled extension if built, pure Python otherwise.

Set TOWERLAB_PURE=1 to force the pure-Python implementations (used by the
benchmark and by the twin-implementation parity tests).
"""

import os

if os.environ.get("TOWERLAB_PURE"):
    from towerlab import _pykernels as _impl
else:
    try:
        from towerlab import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from towerlab import _pykernels as _impl

IMPL = _impl.IMPL

pell_norm = _impl.pell_norm
pell_x_mod64 = _impl.pell_x_mod64
count_forms = _impl.count_forms
count_forms_batch = _impl.count_forms_batch
smallest_prime_factors = _impl.smallest_prime_factors
residue_prime_counts = _impl.residue_prime_counts
