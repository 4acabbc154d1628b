"""Physical constants in the unit system used throughout the package.

All energies are stored as frequencies (E/h).  The working units are
MHz for energy, mT for magnetic field, K for temperature.  With these
choices the Bohr magneton and Boltzmann constant take the convenient
values below (CODATA-derived, truncated to the precision we commit to
in golden files).
"""

# Bohr magneton over Planck constant: 13.996245 GHz/T == 13.996245 MHz/mT.
MU_B_MHZ_PER_MT = 13.996245

# Boltzmann constant over Planck constant, in MHz/K (20.836619 GHz/K).
KB_MHZ_PER_K = 20836.619

# Planck constant (J s), SI exact.
PLANCK_H_JS = 6.62607015e-34

# Superconducting flux quantum h/2e (Wb).
FLUX_QUANTUM_WB = 2.067834e-15
