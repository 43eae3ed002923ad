import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from icec.atomdata import (AtomicSpecies, PhotoTable, gaussian_width, load_pi_table, load_species_registry,
                           pi_cross_section, pi_cross_sections, pi_from_pr, pr_cross_section)
from icec.constants import ANGSTROM, EV, MB
from icec.errors import ConfigurationError, ExtrapolationError, TableParseError, ThresholdError

HEADER = "photon_energy_eV,sigma_Mb\n"


def write(tmp_path, body, name="t.csv"):
    p = tmp_path / name
    p.write_text(body, encoding="utf-8")
    return p


def test_load_two_rows(tmp_path):
    t = load_pi_table(write(tmp_path, "# test data, source X\n" + HEADER + "25,7.0\n26,6.5\n"))
    assert len(t) == 2
    assert t.energy[0] == pytest.approx(25 * EV) and t.sigma[1] == pytest.approx(6.5 * MB)
    assert "source X" in t.provenance


def test_decreasing_energy_names_line(tmp_path):
    with pytest.raises(TableParseError) as info:
        load_pi_table(write(tmp_path, HEADER + "25,7\n26,6\n25.5,6.1\n"))
    assert info.value.line == 4


def test_negative_sigma_names_line(tmp_path):
    with pytest.raises(TableParseError) as info:
        load_pi_table(write(tmp_path, "#c\n" + HEADER + "25,7\n26,-1\n"))
    assert info.value.line == 4
    assert ":4:" in str(info.value)


@pytest.mark.parametrize("body", [
    "energy,sigma\n25,7\n26,6\n",
    HEADER + "25,7,1\n26,6\n",
    HEADER + "25,abc\n26,6\n",
    HEADER + "25,nan\n26,6\n",
    HEADER + "25,7\n",
])
def test_malformed_tables(tmp_path, body):
    with pytest.raises(TableParseError):
        load_pi_table(write(tmp_path, body))


def test_packaged_tables_start_at_ip(species):
    for sp in species.values():
        assert sp.pi_table.energy[0] == pytest.approx(sp.ip, rel=1e-12)
        assert sp.pi_table.provenance


def test_interpolation_exact_at_nodes(species):
    t = species["He"].pi_table
    for i in (0, 10, len(t) - 1):
        assert pi_cross_section(species["He"], t.energy[i]) == t.sigma[i]


def test_per_orbital_ne_is_one_third(species):
    ne = species["Ne"]
    w = 30.0 * EV
    assert pi_cross_section(ne, w, per_orbital=True) == pi_cross_section(ne, w) / 3
    assert pi_cross_section(species["He"], w, per_orbital=True) == pi_cross_section(species["He"], w)


def test_geometric_mean_property(species):
    t = species["Ne"].pi_table
    for i in (3, 40):
        w = math.sqrt(t.energy[i] * t.energy[i + 1])
        expected = math.sqrt(t.sigma[i] * t.sigma[i + 1])
        assert pi_cross_section(species["Ne"], w) == pytest.approx(expected, rel=1e-12)


def test_continuity_at_nodes(species):
    t = species["He"].pi_table
    for i in range(1, len(t) - 1):
        e = t.energy[i]
        left, right = t(e * (1 - 1e-13)), t(e * (1 + 1e-13))
        assert left == pytest.approx(t.sigma[i], rel=1e-12) and right == pytest.approx(t.sigma[i], rel=1e-12)


def test_below_ip_and_above_range(species):
    he = species["He"]
    with pytest.raises(ThresholdError):
        pi_cross_section(he, he.ip * 0.99)
    with pytest.raises(ExtrapolationError):
        pi_cross_section(he, he.pi_table.energy[-1] * 1.01)
    with pytest.raises(ThresholdError):
        pi_cross_sections(he, [he.ip * 1.1, he.ip * 0.9])


def test_vectorized_matches_scalar(species):
    ne = species["Ne"]
    w = np.linspace(ne.ip, ne.pi_table.energy[-1], 57)
    assert np.allclose(pi_cross_sections(ne, w), [pi_cross_section(ne, x) for x in w], rtol=1e-13)


def test_milne_roundtrip_full_range(species):
    for sp in species.values():
        for w in np.linspace(sp.ip * 1.0001, sp.pi_table.energy[-1], 200):
            eps = w - sp.ip
            back = pi_from_pr(sp, eps, pr_cross_section(sp, eps))
            assert back == pytest.approx(pi_cross_section(sp, w), rel=1e-12)


def test_milne_he_one_ev(species):
    he = species["He"]
    eps_ev, c = 1.0, 137.035999
    omega = (1.0 + 24.59) / 27.211386
    k = math.sqrt(2 * eps_ev / 27.211386)
    factor = 0.5 * (omega / (c * k)) ** 2
    assert factor == pytest.approx(3.2e-4, rel=0.01)
    s = pi_cross_section(he, omega)
    assert pr_cross_section(he, eps_ev * EV) == pytest.approx(factor * s, rel=1e-9)


def test_pr_diverges_as_inverse_epsilon():
    t = PhotoTable(np.array([1.0, 2.0]), np.array([3.0, 3.0]))
    sp = AtomicSpecies("T", 1.0, 1, 2, 1.0, t)
    a, b = pr_cross_section(sp, 1e-6), pr_cross_section(sp, 1e-7)
    assert b / a == pytest.approx(10.0, rel=1e-5)
    with pytest.raises(ThresholdError):
        pr_cross_section(sp, 0.0)


@given(st.floats(1e-4, 0.5))
def test_cross_sections_non_negative(eps):
    sp = load_species_registry()["Ne"]
    assert pr_cross_section(sp, eps) >= 0
    assert pi_cross_section(sp, sp.ip + eps) >= 0


def test_gaussian_widths(species):
    assert gaussian_width(species["He"]) / ANGSTROM == pytest.approx(0.448, rel=1e-12)
    assert gaussian_width(species["Ne"]) / ANGSTROM == pytest.approx(0.928, rel=1e-12)
    assert gaussian_width(species["Ne"], 1.0) == species["Ne"].r_cov
    with pytest.raises(ConfigurationError):
        gaussian_width(species["He"], 0.0)


def test_registry_values(species):
    he, ne = species["He"], species["Ne"]
    assert he.ip / EV == pytest.approx(24.59) and ne.ip / EV == pytest.approx(21.56)
    assert (he.g_neutral, he.g_ion, he.orbital_degeneracy) == (1, 2, 1)
    assert (ne.g_neutral, ne.g_ion, ne.orbital_degeneracy) == (1, 6, 3)


def test_registry_rejects_unknown_keys(tmp_path):
    write(tmp_path, HEADER + "25,7\n26,6\n", "x.csv")
    reg = tmp_path / "reg.toml"
    reg.write_text('[[species]]\nname="He"\nip_eV=24.59\ng_neutral=1\ng_ion=2\nr_cov_angstrom=0.28\n'
                   'orbital_degeneracy=1\npi_table_path="x.csv"\ncolour="blue"\n')
    with pytest.raises(ConfigurationError, match="colour"):
        load_species_registry(reg)


def test_registry_relative_table_path(tmp_path):
    write(tmp_path, HEADER + "24.59,7\n26,6\n", "x.csv")
    reg = tmp_path / "reg.toml"
    reg.write_text('[[species]]\nname="He"\nip_eV=24.59\ng_neutral=1\ng_ion=2\nr_cov_angstrom=0.28\n'
                   'orbital_degeneracy=1\npi_table_path="x.csv"\n')
    sp = load_species_registry(reg)["He"]
    assert len(sp.pi_table) == 2


def test_species_invariants():
    t = PhotoTable(np.array([1.0, 2.0]), np.array([1.0, 1.0]))
    with pytest.raises(ConfigurationError):
        AtomicSpecies("T", 1.5, 1, 1, 1.0, t)
    with pytest.raises(ConfigurationError):
        AtomicSpecies("T", 1.0, 1, 1, 1.0, t, orbital_degeneracy=0)
