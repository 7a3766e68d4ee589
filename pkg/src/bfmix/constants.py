"""Physical constants (SI) used throughout the package.

Values come from scipy.constants (CODATA) so they stay consistent with
the rest of the scientific stack.
"""

import scipy.constants as _sc

hbar = _sc.hbar          # J s
h = _sc.h                # J s
k_B = _sc.k              # J / K
atomic_mass = _sc.atomic_mass  # kg, unified atomic mass unit
pi = _sc.pi
