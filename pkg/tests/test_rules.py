import pytest

from euclid2 import corpusdata
from euclid2 import diagram as dg
from euclid2 import rules
from euclid2 import script as sc
from euclid2 import terms as T
from euclid2.errors import (
    DistinctTargets,
    NoCommonTerm,
    NoLink,
    NoMatch,
    NoRightAngle,
    NotComplements,
    VEFailed,
)
from euclid2.terms import parse_statement as ps


def load(name):
    return sc.parse_script(corpusdata.read_script_text(name))


def ctx_for(name):
    script = load(name)
    inst = dg.realize(script)
    fb = rules.FactBase(inst)
    for f in inst.facts:
        fb.add(f.statement, f.reason)
    for h in script.hypotheses:
        fb.add(h.stmt, f"h{h.index}")
    return rules.RuleContext(inst, fb, script.flags)


@pytest.fixture(scope="module")
def ii1():
    return ctx_for("II_1.e2p")


@pytest.fixture(scope="module")
def ii2():
    return ctx_for("II_2.e2p")


@pytest.fixture(scope="module")
def ii3():
    return ctx_for("II_3.e2p")


@pytest.fixture(scope="module")
def ii4():
    return ctx_for("II_4.e2p")


@pytest.fixture(scope="module")
def ii5():
    return ctx_for("II_5.e2p")


@pytest.fixture(scope="module")
def ii7():
    return ctx_for("II_7.e2p")


@pytest.fixture(scope="module")
def ii11():
    return ctx_for("II_11.e2p")


@pytest.fixture(scope="module")
def ii14():
    return ctx_for("II_14.e2p")


def dummy_ctx():
    return rules.RuleContext(None, None, frozenset())


# ---------------------------------------------------------------------------
# substitution rules


def test_r1_examples():
    c = dummy_ctx()
    out = rules.rule_R1(c, ps("BH pi A x BC"), [ps("BH pi GB x BC"), ps("BG == A")])
    assert T.stmt_equal(out.derived, ps("BH pi A x BC"))
    out = rules.rule_R1(c, ps("AF pi AB x AC"), [ps("AF pi DA x AC"), ps("AD == AB")])
    assert T.stmt_equal(out.derived, ps("AF pi AB x AC"))
    with pytest.raises(NoMatch):
        rules.rule_R1(c, ps("BH pi A x BC"), [ps("BH pi GB x BC"), ps("DK == DE")])


def test_r1_preserves_position():
    c = dummy_ctx()
    # the substituted operand keeps its slot: second operand here
    out = rules.rule_R1(c, ps("HD pi BD x AB"), [ps("HD pi BD x BH"), ps("BH == AB")])
    assert out.derived.first == T.mk_segment("B", "D")
    with pytest.raises(NoMatch):
        rules.rule_R1(c, ps("HD pi AB x BD"), [ps("HD pi BD x BH"), ps("BH == AB")])


def test_r2_examples():
    c = dummy_ctx()
    out = rules.rule_R2(c, ps("HF on AC"), [ps("HF on HG"), ps("HG == AC")])
    assert T.stmt_equal(out.derived, ps("HF on AC"))
    out = rules.rule_R2(c, ps("HF on HG"), [ps("HF on HG"), ps("HG == HG")])
    assert T.stmt_equal(out.derived, ps("HF on HG"))
    with pytest.raises(NoMatch):
        rules.rule_R2(c, ps("HF on AC"), [ps("HF on HG"), ps("AB == CD")])


def test_r2_on_equalities():
    c = dummy_ctx()
    out = rules.rule_R2(
        c,
        ps("rect(BE,EF) + sq(GE) = sq(GH)"),
        [ps("rect(BE,EF) + sq(GE) = sq(GF)"), ps("GF == GH")],
    )
    assert T.stmt_equal(out.derived, ps("rect(BE,EF) + sq(GE) = sq(GH)"))
    # standalone form: sq(X) = sq(Y) from X == Y
    out = rules.rule_R2(c, ps("sq(GF) = sq(GH)"), [ps("GF == GH")])
    assert T.stmt_equal(out.derived, ps("sq(GF) = sq(GH)"))


def test_r3_examples(ii5, ii4):
    out = rules.rule_R3(
        ii5,
        ps("rect(AD,DB) = fig(NOP)"),
        [ps("fig(AH) = fig(NOP)"), ps("AH pi AD x DB")],
    )
    assert T.stmt_equal(out.derived, ps("rect(AD,DB) = fig(NOP)"))
    out = rules.rule_R3(
        ii4,
        ps("rect(AC,CB) = fig(GE)"),
        [ps("fig(AG) = fig(GE)"), ps("AG pi AC x CB")],
    )
    assert T.stmt_equal(out.derived, ps("rect(AC,CB) = fig(GE)"))
    with pytest.raises(NoMatch):
        rules.rule_R3(
            ii5,
            ps("rect(AD,DB) = fig(NOP)"),
            [ps("fig(AH) = fig(NOP)"), ps("KH pi AD x DB")],
        )


def test_r3_resolves_diagonal_alias(ii3):
    # the square CE may be renamed by its second diagonal DB
    out = rules.rule_R3(
        ii3,
        ps("fig(AD) + sq(CB) = rect(AB,BC)"),
        [ps("fig(AD) + fig(CE) = rect(AB,BC)"), ps("DB on CB")],
    )
    assert T.stmt_equal(out.derived, ps("fig(AD) + sq(CB) = rect(AB,BC)"))


def test_r4_examples():
    c = dummy_ctx()
    out = rules.rule_R4(
        c,
        ps("fig(FK) = sq(AB)"),
        [ps("rect(CF,FA) = sq(AB)"), ps("FK pi CF x FA")],
    )
    assert T.stmt_equal(out.derived, ps("fig(FK) = sq(AB)"))
    out = rules.rule_R4(
        c,
        ps("fig(BD) = sq(HE)"),
        [ps("rect(BE,EF) = sq(HE)"), ps("BD pi BE x EF")],
    )
    assert T.stmt_equal(out.derived, ps("fig(BD) = sq(HE)"))
    with pytest.raises(NoMatch):
        rules.rule_R4(
            c,
            ps("fig(FK) = sq(AB)"),
            [ps("rect(CF,FA) = sq(AB)"), ps("FK pi FA x CF")],
        )


# ---------------------------------------------------------------------------
# common notions


def test_cn1_examples():
    c = dummy_ctx()
    out = rules.rule_CN("CN1", c, ps("DK == A"), [ps("DK == BG"), ps("BG == A")])
    assert T.stmt_equal(out.derived, ps("DK == A"))
    with pytest.raises(NoLink):
        rules.rule_CN("CN1", c, ps("DK == A"), [ps("DK == BG"), ps("CE == A")])


def test_cn2_example():
    c = dummy_ctx()
    claim = ps("fig(NOP) + fig(LG) = rect(AD,DB) + sq(CD)")
    out = rules.rule_CN(
        "CN2", c, claim, [ps("fig(NOP) = rect(AD,DB)"), ps("fig(LG) = sq(CD)")]
    )
    assert T.stmt_equal(out.derived, claim)


def test_cn3_example():
    c = dummy_ctx()
    out = rules.rule_CN(
        "CN3",
        c,
        ps("rect(BE,EF) = sq(HE)"),
        [ps("rect(BE,EF) + sq(GE) = sq(HE) + sq(GE)")],
    )
    assert T.stmt_equal(out.derived, ps("rect(BE,EF) = sq(HE)"))
    with pytest.raises(NoCommonTerm):
        rules.rule_CN("CN3", c, ps("sq(A) = sq(B)"), [ps("sq(AB) = sq(CD)")])


# ---------------------------------------------------------------------------
# diagram-backed rules


def test_ve_ii1_accepted(ii1):
    out = rules.rule_VE(ii1, ps("fig(BH) = fig(BK) + fig(DL) + fig(EH)"), [])
    assert out.certificate is not None
    assert out.certificate["exact"] is True


def test_ve_ii7_multiplicity(ii7):
    out = rules.rule_VE(ii7, ps("fig(AF) + fig(CE) = fig(KLM) + fig(CF)"), [])
    assert "multiplicity-2" in out.flags


def test_ve_failure(ii1):
    with pytest.raises(VEFailed):
        rules.rule_VE(ii1, ps("fig(BK) + fig(DL) = fig(BH)"), [])


def test_name_examples(ii2, ii3):
    out = rules.rule_NAME(ii2, ps("ADEB on AB"))
    assert out.certificate is not None
    rules.rule_NAME(ii2, ps("AF pi DA x AC"))
    out = rules.rule_NAME(ii3, ps("fig(CE) = fig(DB)"))
    assert "alias" in out.flags


def test_i47_examples(ii11, ii14):
    out = rules.rule_I47(
        ii11, ps("sq(AB) + sq(AE) = sq(EB)"), [ps("rangle(A;B,E)")]
    )
    assert out.certificate is not None
    rules.rule_I47(ii14, ps("sq(HE) + sq(GE) = sq(GH)"), [ps("rangle(E;H,G)")])
    with pytest.raises(NoRightAngle):
        rules.rule_I47(ii11, ps("sq(AB) + sq(AE) = sq(EB)"), [])


def test_i43_examples(ii4, ii5):
    out = rules.rule_I43(ii4, ps("fig(AG) = fig(GE)"), [])
    assert out.certificate is not None
    rules.rule_I43(ii5, ps("fig(CH) = fig(HF)"), [])
    with pytest.raises(NotComplements):
        rules.rule_I43(ii4, ps("fig(AG) = fig(HF)"), [])


def test_double_examples(ii4):
    out = rules.rule_DOUBLE(
        ii4,
        ps("fig(AG) + fig(GE) = 2*rect(AC,CB)"),
        [ps("AG pi AC x CB"), ps("fig(GE) = rect(AC,CB)")],
    )
    assert "unjustified-in-paper" in out.flags
    out = rules.rule_DOUBLE(
        dummy_ctx(), ps("fig(AF) + fig(CE) = 2*fig(AF)"), [ps("fig(AF) = fig(CE)")]
    )
    assert T.stmt_equal(out.derived, ps("fig(AF) + fig(CE) = 2*fig(AF)"))
    with pytest.raises(DistinctTargets):
        rules.rule_DOUBLE(
            ii4,
            ps("fig(AG) + fig(GE) = 2*rect(AC,CB)"),
            [ps("AG pi AC x CB"), ps("fig(GE) = rect(CB,AC)")],
        )


def test_merge_single_premise(ii4):
    claim = ps("fig(HF) + fig(CK) = sq(AC) + sq(CB)")
    out = rules.rule_MERGE(ii4, claim, [claim])
    assert T.stmt_equal(out.derived, claim)


# ---------------------------------------------------------------------------
# checker-level invariants


def all_default_entries():
    return corpusdata.default_entries()


def test_color_mapping_total():
    for rule in rules.Rule:
        assert isinstance(rules.color_of(rule), rules.ColorClass)
    assert rules.color_of(rules.Rule.VE) is rules.ColorClass.RED
    assert rules.color_of(rules.Rule.NAME) is rules.ColorClass.BLUE
    assert rules.color_of(rules.Rule.R1) is rules.ColorClass.VIOLET
    assert rules.color_of(rules.Rule.R2) is rules.ColorClass.VIOLET
    assert rules.color_of(rules.Rule.R3) is rules.ColorClass.MAGENTA
    assert rules.color_of(rules.Rule.R4) is rules.ColorClass.MAGENTA
    for other in (rules.Rule.CN1, rules.Rule.VE, rules.Rule.I43, rules.Rule.I47,
                  rules.Rule.DOUBLE, rules.Rule.MERGE):
        assert rules.color_of(other) in rules.ColorClass


@pytest.mark.parametrize("entry", all_default_entries(), ids=lambda e: e["prop"])
def test_factbase_monotone_and_replay(entry):
    script = load(entry["file"])
    report = rules.check_proof(script)
    assert report.accepted
    counts = report.fact_counts
    assert all(b >= a for a, b in zip(counts, counts[1:]))
    # replay: every accepted step's independently derived statement matches
    for step, derived in zip(script.steps, report.derived):
        assert T.stmt_equal(step.claim, derived)


def _flip_first_rect(stmt):
    flipped = [False]

    def flip_term(t):
        if isinstance(t, T.RectBy) and not flipped[0]:
            flipped[0] = True
            return T.RectBy(t.second, t.first)
        if isinstance(t, T.Multiple):
            inner = flip_term(t.inner)
            return T.Multiple(t.count, inner)
        return t

    if isinstance(stmt, T.Eq):
        lhs = T.term_sum(flip_term(t) for t in stmt.lhs.terms)
        rhs = T.term_sum(flip_term(t) for t in stmt.rhs.terms)
        return (T.Eq(lhs, rhs), flipped[0])
    if isinstance(stmt, T.Pi):
        return (T.Pi(stmt.figure, stmt.second, stmt.first), True)
    return (stmt, False)


@pytest.mark.parametrize("entry", all_default_entries(), ids=lambda e: e["prop"])
def test_no_implicit_commutativity_mutations(entry):
    """Flipping the operand order inside any one step claim's rectangle (or
    contained-by fact) makes the checker reject at or after that step."""
    script = load(entry["file"])
    mutated_any = False
    for k, step in enumerate(script.steps):
        mutated, did = _flip_first_rect(step.claim)
        if not did or T.stmt_equal(mutated, step.claim):
            continue
        mutated_any = True
        steps = list(script.steps)
        steps[k] = sc.ProofStep(step.index, mutated, step.rule, step.premises, step.cert)
        bad = sc.Script(
            prop_id=script.prop_id,
            points=script.points,
            base_lines=script.base_lines,
            params=script.params,
            flags=script.flags,
            construction=script.construction,
            hypotheses=script.hypotheses,
            diorismos=script.diorismos,
            steps=tuple(steps),
        )
        report = rules.check_proof(bad)
        assert not report.accepted, (entry["prop"], step.index)
        assert report.reject_step >= step.index
    if entry["prop"] in ("II.1", "II.2", "II.3", "II.4", "II.5", "II.6", "II.7",
                         "II.11", "II.12", "II.13", "II.14"):
        assert mutated_any
