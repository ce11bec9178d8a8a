"""Corpus factory: heights, construction precision policy, group kinds."""

import math

import pytest

from fglab.corpus import (
    CORPUS_SPECS,
    canonical_lt_coeffs,
    construction_precision,
    corpus,
    make_group,
    source_height,
)


class TestSourceHeight:
    def test_known_heights(self):
        assert source_height(3, "multiplicative") == 1
        assert source_height(3, "lubin-tate", d=2) == 2
        assert source_height(3, "honda", u=(0, 1)) == 2
        assert source_height(3, "honda", u=(3, 9)) == math.inf
        assert source_height(3, "lubin-tate", coeffs=[0, 3, 3, 1]) == 1

    def test_unknown_source(self):
        with pytest.raises(ValueError):
            source_height(3, "elliptic")


class TestFactory:
    def test_canonical_coeffs(self):
        assert canonical_lt_coeffs(3, 1) == [0, 3, 0, 1]
        c = canonical_lt_coeffs(3, 2)
        assert c[1] == 3 and c[9] == 1 and sum(map(abs, c)) == 4

    def test_construction_cushion_grows_with_window(self):
        base = construction_precision(3, 2, 8, 1)
        assert construction_precision(3, 2, 8, 2) >= base
        assert construction_precision(3, 2, 11, 2) > construction_precision(3, 2, 8, 2)

    def test_corpus_shapes(self):
        groups = dict(corpus(N=6, nmax=1))
        assert set(groups) == {name for name, _ in CORPUS_SPECS}
        assert groups["mult-p3"].height == 1
        assert groups["lt-h2-p3"].height == 2
        assert groups["lt-h2-p3"].desc.f == 2
        assert groups["honda-h2-p3"].height == 2
        for _, g in groups.items():
            assert g.desc.N >= 6

    def test_working_precision_supported(self):
        # the factory must leave room for the level-nmax torsion model
        g = make_group(3, 2, 11, "lubin-tate", d=2, nmax=2)
        from fglab.torsion import TorsionFieldModel
        model = TorsionFieldModel(g, 1, 11)
        assert model.e == 8
