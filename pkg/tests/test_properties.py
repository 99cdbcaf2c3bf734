import pytest

import properties


@pytest.mark.parametrize("name, prop", properties.ALL, ids=[p.__name__ for _, p in properties.ALL])
def test_property(name, prop):
    prop()


def test_verifier_properties_are_not_vacuous():
    # enough random pairs must pass the checker for the implications to mean anything
    properties.prop_verifier_oracle_soundness()
    properties.prop_verifier_engine()
    assert properties.PASSED["oracle"] >= 20
    assert properties.PASSED["engine"] >= 20
