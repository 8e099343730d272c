import pytest


@pytest.fixture
def ab_catalog():
    import semival as sv

    return sv.VariableCatalog.of({"u": ("a", "b")})
