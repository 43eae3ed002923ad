"""Unit conversions. Everything inside the package is in Hartree atomic units."""

HARTREE_EV = 27.211386
EV = 1.0 / HARTREE_EV

BOHR_ANGSTROM = 0.52917721
ANGSTROM = 1.0 / BOHR_ANGSTROM

BOHR2_MB = 28.00285
MB = 1.0 / BOHR2_MB

HARTREE_CM = 219474.63
CM = 1.0 / HARTREE_CM

K_B = 3.166812e-6  # hartree / K
C_LIGHT = 137.035999

AMU_ME = 1822.888486

# standard atomic weights
MASS_HE = 4.002602
MASS_NE = 20.1797


def reduced_mass(m1_amu, m2_amu):
    """Reduced mass in electron masses from two masses in unified atomic mass units."""
    return m1_amu * m2_amu / (m1_amu + m2_amu) * AMU_ME
