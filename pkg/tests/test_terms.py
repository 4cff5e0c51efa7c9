import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from euclid2 import terms as T
from euclid2.errors import DegenerateSegment, ParseError


def seg(s):
    return T.Segment(s[0], s[1], display=s) if len(s) == 2 else T.standalone_segment(s)


def test_mk_segment_unordered():
    assert T.mk_segment("B", "G") == T.mk_segment("G", "B")
    assert T.mk_segment("A", "B") == T.Segment("A", "B")


def test_mk_segment_degenerate():
    with pytest.raises(DegenerateSegment):
        T.mk_segment("A", "A")


def test_normalize_permutation_invariance():
    a = T.term_sum([T.SquareOn(seg("CB")), T.RectBy(seg("AC"), seg("CB"))])
    b = T.term_sum([T.RectBy(seg("AC"), seg("CB")), T.SquareOn(seg("CB"))])
    assert a == b
    assert T.normalize(a) == a


def test_normalize_keeps_rect_operand_order():
    s = T.term_sum([T.RectBy(seg("GB"), seg("BD"))])
    t = T.normalize(s)
    rect = t.terms[0]
    # GB canonicalizes to the unordered pair {B,G} but stays first operand
    assert rect.first == T.mk_segment("B", "G")
    assert rect.second == T.mk_segment("B", "D")


def test_duplicate_squares_multiset():
    a = T.term_sum([T.SquareOn(seg("HE")), T.SquareOn(seg("GE"))])
    b = T.term_sum([T.SquareOn(seg("GE")), T.SquareOn(seg("HE"))])
    assert a == b


def test_stmt_equal_eq_symmetric():
    a = T.parse_statement("rect(BA,AC) = fig(AF)")
    b = T.parse_statement("fig(AF) = rect(BA,AC)")
    assert T.stmt_equal(a, b)


def test_stmt_equal_pi_operand_order_significant():
    a = T.parse_statement("BK pi GB x BD")
    b = T.parse_statement("BK pi BD x GB")
    assert not T.stmt_equal(a, b)


def test_stmt_equal_segment_endpoint_order_immaterial():
    a = T.parse_statement("BK pi GB x BD")
    b = T.parse_statement("BK pi BG x BD")
    assert T.stmt_equal(a, b)


def test_multiple_invariants():
    with pytest.raises(ValueError):
        T.Multiple(1, T.SquareOn(seg("AB")))
    with pytest.raises(ValueError):
        T.Multiple(2, T.Multiple(2, T.SquareOn(seg("AB"))))


def test_statement_roundtrip_text():
    texts = [
        "sq(AB) = sq(AC) + sq(CB) + 2*rect(AC,CB)",
        "BH pi A x BC",
        "ADEB on AB",
        "AB == CD",
        "rangle(B;A,C)",
        "fig(NOP) + sq(BC) = fig(CEFD)",
    ]
    for t in texts:
        stmt = T.parse_statement(t)
        again = T.parse_statement(T.stmt_text(stmt))
        assert T.stmt_equal(stmt, again)


def test_parse_statement_errors():
    with pytest.raises(ParseError):
        T.parse_statement("sq(AB) +")
    with pytest.raises(ParseError):
        T.parse_statement("rect(AB) = sq(AB)")


# ---------------------------------------------------------------------------
# property tests

LETTERS = "ABCDEFGHKLM"


@st.composite
def segments(draw):
    if draw(st.booleans()):
        a = draw(st.sampled_from(LETTERS))
        b = draw(st.sampled_from([c for c in LETTERS if c != a]))
        return T.Segment(a, b, display=a + b)
    return T.standalone_segment(draw(st.sampled_from(LETTERS)))


@st.composite
def terms(draw, depth=0):
    kind = draw(st.integers(0, 3 if depth == 0 else 2))
    if kind == 0:
        return T.SquareOn(draw(segments()))
    if kind == 1:
        return T.RectBy(draw(segments()), draw(segments()))
    if kind == 2:
        return T.Fig(T.FigureName(draw(st.text(LETTERS, min_size=1, max_size=4))))
    return T.Multiple(draw(st.integers(2, 4)), draw(terms(depth=1)))


@st.composite
def sums(draw):
    return T.term_sum(draw(st.lists(terms(), min_size=1, max_size=4)))


@st.composite
def statements(draw):
    kind = draw(st.integers(0, 4))
    if kind == 0:
        return T.Eq(draw(sums()), draw(sums()))
    if kind == 1:
        return T.Pi(
            T.FigureName(draw(st.text(LETTERS, min_size=1, max_size=4))),
            draw(segments()),
            draw(segments()),
        )
    if kind == 2:
        return T.IsSq(
            T.FigureName(draw(st.text(LETTERS, min_size=1, max_size=4))),
            draw(segments()),
        )
    if kind == 3:
        return T.SegEq(draw(segments()), draw(segments()))
    a = draw(st.sampled_from(LETTERS))
    return T.RightAngle(
        a,
        draw(st.sampled_from([c for c in LETTERS if c != a])),
        draw(st.sampled_from([c for c in LETTERS if c != a])),
    )


@given(sums())
@settings(max_examples=200)
def test_normalize_idempotent_and_cardinality(s):
    n = T.normalize(s)
    assert T.normalize(n) == n
    assert len(n.terms) == len(s.terms)


def _rect_orders(s):
    out = []

    def walk(t):
        if isinstance(t, T.RectBy):
            out.append((t.first, t.second))
        elif isinstance(t, T.Multiple):
            walk(t.inner)

    for t in s.terms:
        walk(t)
    return sorted(out, key=repr)


@given(sums())
@settings(max_examples=200)
def test_normalize_never_swaps_rect_operands(s):
    assert _rect_orders(T.normalize(s)) == _rect_orders(s)


@given(statements())
@settings(max_examples=300)
def test_stmt_equal_reflexive(a):
    assert T.stmt_equal(a, a)


@given(statements(), statements())
@settings(max_examples=300)
def test_stmt_equal_symmetric_relation(a, b):
    assert T.stmt_equal(a, b) == T.stmt_equal(b, a)


@given(statements(), statements(), statements())
@settings(max_examples=300)
def test_stmt_equal_transitive(a, b, c):
    if T.stmt_equal(a, b) and T.stmt_equal(b, c):
        assert T.stmt_equal(a, c)


@given(st.data())
@settings(max_examples=200)
def test_stmt_equal_on_shuffled_variants(data):
    stmt = data.draw(statements())
    if isinstance(stmt, T.Eq):
        flipped = T.Eq(stmt.rhs, stmt.lhs)
        assert T.stmt_equal(stmt, flipped)
    if isinstance(stmt, T.SegEq):
        assert T.stmt_equal(stmt, T.SegEq(stmt.b, stmt.a))
    if isinstance(stmt, T.RightAngle):
        assert T.stmt_equal(stmt, T.RightAngle(stmt.vertex, stmt.arm2, stmt.arm1))
