import pytest
from hypothesis import given
from hypothesis import strategies as st

from confstress.errors import ParseError
from confstress.versions import VersionId


class TestParsing:
    @pytest.mark.parametrize("text, expected", [
        ("5.17", VersionId(5, 17)),
        ("5.17 rc3", VersionId(5, 17, rc=3)),
        ("5.17-rc3", VersionId(5, 17, rc=3)),
        ("5.17rc3", VersionId(5, 17, rc=3)),
        ("1.0.0-rc6", VersionId(1, 0, 0, rc=6)),
        ("v4.9", VersionId(4, 9)),
        ("20.10.14", VersionId(20, 10, 14)),
        ("19.03.11", VersionId(19, 3, 11)),
    ])
    def test_grammar(self, text, expected):
        assert VersionId.parse(text) == expected

    @pytest.mark.parametrize("text", ["", "abc", "5", "5.", "5.17-rc", "5.17-rc0", "-1.2"])
    def test_malformed(self, text):
        with pytest.raises((ParseError, ValueError)):
            VersionId.parse(text)


class TestOrdering:
    def test_rc_precedes_release(self):
        assert VersionId.parse("5.17 rc3") < VersionId.parse("5.17")
        assert not VersionId.parse("5.17") < VersionId.parse("5.17 rc3")

    def test_rc_numbers_order(self):
        assert VersionId.parse("5.17-rc1") < VersionId.parse("5.17-rc2")
        assert VersionId.parse("5.17-rc9") < VersionId.parse("5.17")

    def test_triple_order(self):
        assert VersionId.parse("4.20") < VersionId.parse("5.0")
        assert VersionId.parse("5.16") < VersionId.parse("5.17-rc1")
        assert VersionId.parse("1.2.3") < VersionId.parse("1.2.10")

    def test_release_accessor(self):
        assert VersionId.parse("5.17-rc3").release == VersionId(5, 17)
        assert VersionId.parse("5.17").release == VersionId(5, 17)


versions = st.builds(
    VersionId,
    major=st.integers(0, 30),
    minor=st.integers(0, 30),
    patch=st.integers(0, 30),
    rc=st.one_of(st.none(), st.integers(1, 12)),
)


@given(versions, versions, versions)
def test_total_order(a, b, c):
    # antisymmetry and transitivity over the generated space
    if a < b:
        assert not b < a
    if a < b and b < c:
        assert a < c
    assert (a < b) or (b < a) or (a == b)


@given(versions)
def test_str_round_trip(v):
    assert VersionId.parse(str(v)) == v
