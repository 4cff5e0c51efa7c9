"""Proof-script file format (`.e2p`): parsing, canonical formatting, and
check-report serialization.

The grammar is line oriented.  A script has the shape

    prop II.5
    points A B C ...
    line A C D B
    param d = 1/5
    flags allow-overlap
    construct:
      place AB = 1
      ...
    hypothesis fig(AL) = fig(CM) ; flag I.36-external
    claim: rect(AD,DB) + sq(CD) = sq(CB)
    proof:
      1. fig(CH) = fig(HF) ; I43
      2. AH pi AD x DB ; R1 [AH pi AD x DH] [DH == DB]
    qed

Statement syntax is the stable text form from the term layer.  Step premises
are earlier steps (`s2`), hypotheses (`h1`), or inline statements in square
brackets, which the checker resolves against construction facts or, for
naming forms, against the diagram.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError, UndeclaredPoint, UnknownRule
from .terms import (
    Eq,
    Statement,
    parse_rational,
    parse_statement,
    rational_text,
    stmt_text,
)

RULE_NAMES = (
    "R1",
    "R2",
    "R3",
    "R4",
    "CN1",
    "CN2",
    "CN3",
    "VE",
    "NAME",
    "I43",
    "I47",
    "DOUBLE",
    "MERGE",
    "BM",
)


# ---------------------------------------------------------------------------
# length expressions


@dataclass(frozen=True)
class LenLit:
    value: Fraction

    def text(self) -> str:
        return rational_text(self.value)


@dataclass(frozen=True)
class LenParam:
    name: str

    def text(self) -> str:
        return self.name


@dataclass(frozen=True)
class LenSeg:
    seg: str  # "XY" or "A"

    def text(self) -> str:
        return f"|{self.seg}|"


LenExpr = LenLit | LenParam | LenSeg


def _parse_len(tok: str, line: int) -> LenExpr:
    tok = tok.strip()
    m = re.match(r"^\|([A-Z]{1,2})\|$", tok)
    if m:
        return LenSeg(m.group(1))
    if re.match(r"^-?\d+(/\d+)?$", tok):
        return LenLit(parse_rational(tok, line))
    if re.match(r"^[a-z][a-z0-9_]*$", tok):
        return LenParam(tok)
    raise ParseError(line, 1, f"length expression, got {tok!r}")


# ---------------------------------------------------------------------------
# construction commands


@dataclass(frozen=True)
class PlaceSegment:
    p: str
    q: str
    length: LenExpr

    def text(self):
        return f"place {self.p}{self.q} = {self.length.text()}"


@dataclass(frozen=True)
class StandaloneSegmentCmd:
    name: str
    length: LenExpr

    def text(self):
        return f"segment {self.name} = {self.length.text()}"


@dataclass(frozen=True)
class CutRandom:
    point: str
    on: tuple[str, str]
    at: LenExpr

    def text(self):
        return f"cut {self.point} on {self.on[0]}{self.on[1]} at {self.at.text()}"


@dataclass(frozen=True)
class CutHalf:
    point: str
    on: tuple[str, str]

    def text(self):
        return f"cuthalf {self.point} on {self.on[0]}{self.on[1]}"


@dataclass(frozen=True)
class ExtendBy:
    on: tuple[str, str]
    to: str
    by: LenExpr

    def text(self):
        return f"extend {self.on[0]}{self.on[1]} to {self.to} by {self.by.text()}"


@dataclass(frozen=True)
class ExtendCopy:
    on: tuple[str, str]
    to: str
    anchor: str
    copy: tuple[str, str]

    def text(self):
        return (
            f"extend {self.on[0]}{self.on[1]} to {self.to} "
            f"with {self.to}{self.anchor} = {self.copy[0]}{self.copy[1]}"
        )


@dataclass(frozen=True)
class SquareOnCmd:
    name: str  # 4 letters, boundary order, containing the base edge
    on: tuple[str, str]
    side: str  # below | above | left | right

    def text(self):
        return f"square {self.name} on {self.on[0]}{self.on[1]} {self.side}"


@dataclass(frozen=True)
class RectFig:
    name: str  # single letter
    width: LenExpr
    height: LenExpr

    def text(self):
        return f"rectfig {self.name} {self.width.text()} x {self.height.text()}"


@dataclass(frozen=True)
class TriangulateToRect:
    name: str  # 4 letters
    source: str  # declared figure

    def text(self):
        return f"torect {self.name} from {self.source}"


@dataclass(frozen=True)
class Perp:
    new: str
    frm: str
    on: tuple[str, str]
    side: str
    length: LenExpr

    def text(self):
        return (
            f"perp {self.new} from {self.frm} on {self.on[0]}{self.on[1]} "
            f"{self.side} len {self.length.text()}"
        )


@dataclass(frozen=True)
class ParallelTranslate:
    new: str
    through: str
    along: tuple[str, str]

    def text(self):
        return f"parallel {self.new} through {self.through} along {self.along[0]}{self.along[1]}"


@dataclass(frozen=True)
class ParallelMeet:
    new: str
    through: str
    along: tuple[str, str]
    meet: tuple[str, str]

    def text(self):
        return (
            f"parallel {self.new} through {self.through} along "
            f"{self.along[0]}{self.along[1]} meet {self.meet[0]}{self.meet[1]}"
        )


@dataclass(frozen=True)
class Join:
    p: str
    q: str

    def text(self):
        return f"join {self.p} {self.q}"


@dataclass(frozen=True)
class SemicircleOn:
    on: tuple[str, str]
    center: str
    side: str

    def text(self):
        return f"semicircle on {self.on[0]}{self.on[1]} center {self.center} {self.side}"


@dataclass(frozen=True)
class IntersectAt:
    new: str
    line: tuple[str, str]
    other: tuple[str, str] | str  # line endpoints, or circle center label
    other_kind: str  # "line" | "circle"
    side: str | None  # above | below for circle intersections

    def text(self):
        if self.other_kind == "line":
            rhs = f"line {self.other[0]}{self.other[1]}"
        else:
            rhs = f"circle {self.other}"
        suffix = f" {self.side}" if self.side else ""
        return f"intersect {self.new} = line {self.line[0]}{self.line[1]} x {rhs}{suffix}"


@dataclass(frozen=True)
class GnomonDecl:
    name: str  # 3 letters
    outer: str
    corner: str

    def text(self):
        return f"gnomon {self.name} = {self.outer} minus {self.corner}"


ConstructionCmd = (
    PlaceSegment
    | StandaloneSegmentCmd
    | CutRandom
    | CutHalf
    | ExtendBy
    | ExtendCopy
    | SquareOnCmd
    | RectFig
    | TriangulateToRect
    | Perp
    | ParallelTranslate
    | ParallelMeet
    | Join
    | SemicircleOn
    | IntersectAt
    | GnomonDecl
)


# ---------------------------------------------------------------------------
# proof steps


@dataclass(frozen=True)
class StepRef:
    index: int

    def text(self):
        return f"s{self.index}"


@dataclass(frozen=True)
class HypRef:
    index: int

    def text(self):
        return f"h{self.index}"


@dataclass(frozen=True)
class InlinePremise:
    stmt: Statement

    def text(self):
        return f"[{stmt_text(self.stmt)}]"


PremiseRef = StepRef | HypRef | InlinePremise


@dataclass(frozen=True)
class ProofStep:
    index: int
    claim: Statement
    rule: str
    premises: tuple[PremiseRef, ...]
    cert: str | None = None

    def text(self):
        parts = [f"{self.index}. {stmt_text(self.claim)} ; {self.rule}"]
        for p in self.premises:
            parts.append(p.text())
        if self.cert:
            parts.append(f"cert={self.cert}")
        return " ".join(parts)


@dataclass(frozen=True)
class Hypothesis:
    index: int
    stmt: Statement
    flag: str

    def text(self):
        return f"hypothesis {stmt_text(self.stmt)} ; flag {self.flag}"


@dataclass
class Script:
    prop_id: str
    points: tuple[str, ...]
    base_lines: tuple[tuple[str, ...], ...]
    params: dict[str, Fraction | None]
    flags: frozenset[str]
    construction: tuple[ConstructionCmd, ...]
    hypotheses: tuple[Hypothesis, ...]
    diorismos: Eq
    steps: tuple[ProofStep, ...]

    def param_defaults(self) -> dict[str, Fraction]:
        out = {}
        for name, val in self.params.items():
            if val is None:
                raise ParseError(0, 1, f"param {name} has no default value")
            out[name] = val
        return out


# ---------------------------------------------------------------------------
# parsing

_POINTS_RE = re.compile(r"^[A-Z]$")


class _Parser:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.i = 0

    def err(self, col: int, expected: str) -> ParseError:
        return ParseError(self.i + 1, col, expected)

    def parse(self) -> Script:
        prop_id = None
        points: list[str] = []
        base_lines: list[tuple[str, ...]] = []
        params: dict[str, Fraction | None] = {}
        flags: set[str] = set()
        construction: list[ConstructionCmd] = []
        hypotheses: list[Hypothesis] = []
        diorismos: Eq | None = None
        steps: list[ProofStep] = []
        section = "header"
        saw_qed = False

        declared_segments: set[str] = set()
        declared_figures: set[str] = set()

        for self.i, raw in enumerate(self.lines):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if saw_qed:
                raise self.err(1, "no content allowed after qed")
            if line == "construct:":
                section = "construct"
                continue
            if line.startswith("claim:"):
                section = "claim"
                body = line[len("claim:") :].strip()
                stmt = parse_statement(body, self.i + 1)
                if not isinstance(stmt, Eq):
                    raise self.err(1, "diorismos must be an equality of sums")
                diorismos = stmt
                continue
            if line == "proof:":
                if diorismos is None:
                    raise self.err(1, "claim must precede proof")
                section = "proof"
                continue
            if line == "qed":
                saw_qed = True
                continue

            if section == "header":
                if line.startswith("prop "):
                    prop_id = line[5:].strip()
                    continue
                if line.startswith("points "):
                    for tok in line[7:].split():
                        if not _POINTS_RE.match(tok):
                            raise self.err(
                                raw.find(tok) + 1, f"single-letter point, got {tok!r}"
                            )
                        if tok in points:
                            raise self.err(raw.find(tok) + 1, f"duplicate point {tok}")
                        points.append(tok)
                    continue
                if line.startswith("line "):
                    seq = tuple(line[5:].split())
                    for tok in seq:
                        if tok not in points:
                            raise UndeclaredPoint(self.i + 1, raw.find(tok) + 1, tok)
                    if len(seq) < 2:
                        raise self.err(1, "line needs at least two points")
                    base_lines.append(seq)
                    continue
                if line.startswith("param "):
                    body = line[6:]
                    if "=" in body:
                        name, val = body.split("=", 1)
                        params[name.strip()] = parse_rational(val, self.i + 1)
                    else:
                        params[body.strip()] = None
                    continue
                if line.startswith("flags "):
                    flags.update(line[6:].split())
                    continue
                raise self.err(1, f"header directive, got {line!r}")

            if section == "construct":
                if line.startswith("hypothesis "):
                    section = "hypotheses"
                else:
                    construction.append(self._parse_command(line, raw))
                    continue

            if section in ("hypotheses",) or (
                section == "claim" and line.startswith("hypothesis ")
            ):
                if not line.startswith("hypothesis "):
                    raise self.err(1, "hypothesis or claim expected")
                hypotheses.append(self._parse_hypothesis(line, len(hypotheses) + 1))
                section = "hypotheses"
                continue

            if section == "proof":
                steps.append(self._parse_step(line, raw))
                continue

            raise self.err(1, f"unexpected line in section {section!r}: {line!r}")

        if prop_id is None:
            raise ParseError(1, 1, "missing prop header")
        if diorismos is None:
            raise ParseError(len(self.lines), 1, "missing claim")
        if not saw_qed:
            raise ParseError(len(self.lines), 1, "missing qed")
        for k, s in enumerate(steps):
            if s.index != k + 1:
                raise ParseError(1, 1, f"step indices must be dense from 1, got {s.index}")

        for cmd in construction:
            if isinstance(cmd, StandaloneSegmentCmd):
                declared_segments.add(cmd.name)
            if isinstance(cmd, (RectFig,)):
                declared_figures.add(cmd.name)
            if isinstance(cmd, GnomonDecl):
                declared_figures.add(cmd.name)
            if isinstance(cmd, (SquareOnCmd, TriangulateToRect)):
                declared_figures.add(cmd.name)

        script = Script(
            prop_id=prop_id,
            points=tuple(points),
            base_lines=tuple(base_lines),
            params=params,
            flags=frozenset(flags),
            construction=tuple(construction),
            hypotheses=tuple(hypotheses),
            diorismos=diorismos,
            steps=tuple(steps),
        )
        _validate_labels(script, declared_segments, declared_figures, self.lines)
        return script

    # -- command parsing ---------------------------------------------------

    def _seg_pair(self, tok: str, raw: str) -> tuple[str, str]:
        if not re.match(r"^[A-Z]{2}$", tok):
            raise self.err(raw.find(tok) + 1, f"two-letter segment, got {tok!r}")
        return (tok[0], tok[1])

    def _parse_command(self, line: str, raw: str) -> ConstructionCmd:
        toks = line.split()
        head = toks[0]
        ln = self.i + 1

        def want(pattern: str):
            m = re.match(pattern, line)
            if not m:
                raise self.err(1, f"malformed {head} command: {line!r}")
            return m

        if head == "place":
            m = want(r"^place ([A-Z])([A-Z]) = (\S+)$")
            return PlaceSegment(m.group(1), m.group(2), _parse_len(m.group(3), ln))
        if head == "segment":
            m = want(r"^segment ([A-Z]) = (\S+)$")
            return StandaloneSegmentCmd(m.group(1), _parse_len(m.group(2), ln))
        if head == "cut":
            m = want(r"^cut ([A-Z]) on ([A-Z])([A-Z]) at (\S+)$")
            return CutRandom(m.group(1), (m.group(2), m.group(3)), _parse_len(m.group(4), ln))
        if head == "cuthalf":
            m = want(r"^cuthalf ([A-Z]) on ([A-Z])([A-Z])$")
            return CutHalf(m.group(1), (m.group(2), m.group(3)))
        if head == "extend":
            m = re.match(r"^extend ([A-Z])([A-Z]) to ([A-Z]) by (\S+)$", line)
            if m:
                return ExtendBy((m.group(1), m.group(2)), m.group(3), _parse_len(m.group(4), ln))
            m = want(
                r"^extend ([A-Z])([A-Z]) to ([A-Z]) with ([A-Z])([A-Z]) = ([A-Z])([A-Z])$"
            )
            if m.group(4) != m.group(3):
                raise self.err(1, "copy spec must start with the new point")
            return ExtendCopy(
                (m.group(1), m.group(2)),
                m.group(3),
                m.group(5),
                (m.group(6), m.group(7)),
            )
        if head == "square":
            m = want(r"^square ([A-Z]{4}) on ([A-Z])([A-Z]) (below|above|left|right)$")
            return SquareOnCmd(m.group(1), (m.group(2), m.group(3)), m.group(4))
        if head == "rectfig":
            m = want(r"^rectfig ([A-Z]) (\S+) x (\S+)$")
            return RectFig(m.group(1), _parse_len(m.group(2), ln), _parse_len(m.group(3), ln))
        if head == "torect":
            m = want(r"^torect ([A-Z]{4}) from ([A-Z])$")
            return TriangulateToRect(m.group(1), m.group(2))
        if head == "perp":
            m = want(
                r"^perp ([A-Z]) from ([A-Z]) on ([A-Z])([A-Z]) (below|above) len (\S+)$"
            )
            return Perp(
                m.group(1), m.group(2), (m.group(3), m.group(4)), m.group(5),
                _parse_len(m.group(6), ln),
            )
        if head == "parallel":
            m = re.match(
                r"^parallel ([A-Z]) through ([A-Z]) along ([A-Z])([A-Z]) meet ([A-Z])([A-Z])$",
                line,
            )
            if m:
                return ParallelMeet(
                    m.group(1), m.group(2), (m.group(3), m.group(4)),
                    (m.group(5), m.group(6)),
                )
            m = want(r"^parallel ([A-Z]) through ([A-Z]) along ([A-Z])([A-Z])$")
            return ParallelTranslate(m.group(1), m.group(2), (m.group(3), m.group(4)))
        if head == "join":
            m = want(r"^join ([A-Z]) ([A-Z])$")
            return Join(m.group(1), m.group(2))
        if head == "semicircle":
            m = want(r"^semicircle on ([A-Z])([A-Z]) center ([A-Z]) (above|below)$")
            return SemicircleOn((m.group(1), m.group(2)), m.group(3), m.group(4))
        if head == "intersect":
            m = re.match(
                r"^intersect ([A-Z]) = line ([A-Z])([A-Z]) x line ([A-Z])([A-Z])$", line
            )
            if m:
                return IntersectAt(
                    m.group(1), (m.group(2), m.group(3)), (m.group(4), m.group(5)),
                    "line", None,
                )
            m = want(r"^intersect ([A-Z]) = line ([A-Z])([A-Z]) x circle ([A-Z]) (above|below)$")
            return IntersectAt(m.group(1), (m.group(2), m.group(3)), m.group(4), "circle", m.group(5))
        if head == "gnomon":
            m = want(r"^gnomon ([A-Z]{3}) = ([A-Z]{1,4}) minus ([A-Z]{1,4})$")
            return GnomonDecl(m.group(1), m.group(2), m.group(3))
        raise self.err(1, f"unknown construction command {head!r}")

    def _parse_hypothesis(self, line: str, index: int) -> Hypothesis:
        m = re.match(r"^hypothesis (.+?) ; flag (\S+)$", line)
        if not m:
            raise self.err(1, "hypothesis <stmt> ; flag <word>")
        stmt = parse_statement(m.group(1), self.i + 1)
        return Hypothesis(index, stmt, m.group(2))

    def _parse_step(self, line: str, raw: str) -> ProofStep:
        m = re.match(r"^(\d+)\.\s+(.+?)\s+;\s+(\S+)\s*(.*)$", line)
        if not m:
            raise self.err(1, "step: <n>. <statement> ; <RULE> <premises>")
        index = int(m.group(1))
        claim = parse_statement(m.group(2), self.i + 1)
        rule = m.group(3)
        if rule not in RULE_NAMES:
            raise UnknownRule(self.i + 1, raw.find(rule) + 1, rule)
        rest = m.group(4).strip()
        premises: list[PremiseRef] = []
        cert = None
        pos = 0
        while pos < len(rest):
            ch = rest[pos]
            if ch.isspace():
                pos += 1
                continue
            if ch == "[":
                end = rest.find("]", pos)
                if end < 0:
                    raise self.err(raw.find(rest) + pos + 1, "unterminated [premise]")
                premises.append(
                    InlinePremise(parse_statement(rest[pos + 1 : end], self.i + 1))
                )
                pos = end + 1
                continue
            m2 = re.match(r"s(\d+)", rest[pos:])
            if m2:
                premises.append(StepRef(int(m2.group(1))))
                pos += m2.end()
                continue
            m2 = re.match(r"h(\d+)", rest[pos:])
            if m2:
                premises.append(HypRef(int(m2.group(1))))
                pos += m2.end()
                continue
            m2 = re.match(r"cert=(\S+)", rest[pos:])
            if m2:
                cert = m2.group(1)
                pos += m2.end()
                continue
            raise self.err(raw.find(rest) + pos + 1, f"premise token, got {rest[pos:]!r}")
        return ProofStep(index, claim, rule, tuple(premises), cert)


def _stmt_labels(stmt: Statement):
    """(point-or-lone-segment letters, figure names) mentioned by a statement."""
    from . import terms as T

    segs: list[str] = []
    figs: list[str] = []

    def seg(s):
        segs.append(s.text() if s.display else (s.a + (s.b or "")))

    def term(t):
        if isinstance(t, T.SquareOn):
            seg(t.side)
        elif isinstance(t, T.RectBy):
            seg(t.first)
            seg(t.second)
        elif isinstance(t, T.Fig):
            figs.append(t.name.letters)
        elif isinstance(t, T.Multiple):
            term(t.inner)

    if isinstance(stmt, T.Eq):
        for t in stmt.lhs.terms + stmt.rhs.terms:
            term(t)
    elif isinstance(stmt, T.Pi):
        figs.append(stmt.figure.letters)
        seg(stmt.first)
        seg(stmt.second)
    elif isinstance(stmt, T.IsSq):
        figs.append(stmt.figure.letters)
        seg(stmt.side)
    elif isinstance(stmt, T.SegEq):
        seg(stmt.a)
        seg(stmt.b)
    elif isinstance(stmt, T.RightAngle):
        segs.extend([stmt.vertex + stmt.arm1, stmt.vertex + stmt.arm2])
    return segs, figs


def _validate_labels(script: Script, declared_segments, declared_figures, lines):
    roster = set(script.points)

    def check_stmt(stmt: Statement, lineno: int):
        segs, figs = _stmt_labels(stmt)
        for s in segs:
            if len(s) == 1:
                if s not in declared_segments:
                    raise UndeclaredPoint(lineno, 1, s)
            else:
                for p in s:
                    if p not in roster:
                        raise UndeclaredPoint(lineno, 1, p)
        for f in figs:
            if len(f) in (2, 4):
                for p in f:
                    if p not in roster:
                        raise UndeclaredPoint(lineno, 1, p)
            elif f not in declared_figures:
                raise UndeclaredPoint(lineno, 1, f)

    def lineno_of(needle: str) -> int:
        for k, ln in enumerate(lines):
            if needle in ln:
                return k + 1
        return 1

    for h in script.hypotheses:
        check_stmt(h.stmt, lineno_of(stmt_text(h.stmt).split(" ")[0]))
    check_stmt(script.diorismos, lineno_of("claim:"))
    for s in script.steps:
        check_stmt(s.claim, lineno_of(f"{s.index}."))
        for p in s.premises:
            if isinstance(p, InlinePremise):
                check_stmt(p.stmt, lineno_of(f"{s.index}."))


def parse_script(text: str) -> Script:
    return _Parser(text).parse()


def format_script(s: Script) -> str:
    out = [f"prop {s.prop_id}"]
    if s.points:
        out.append("points " + " ".join(s.points))
    for line in s.base_lines:
        out.append("line " + " ".join(line))
    for name, val in s.params.items():
        out.append(f"param {name}" + (f" = {rational_text(val)}" if val is not None else ""))
    if s.flags:
        out.append("flags " + " ".join(sorted(s.flags)))
    out.append("construct:")
    for cmd in s.construction:
        out.append("  " + cmd.text())
    for h in s.hypotheses:
        out.append(h.text())
    out.append(f"claim: {stmt_text(s.diorismos)}")
    out.append("proof:")
    for st in s.steps:
        out.append("  " + st.text())
    out.append("qed")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# check reports


@dataclass
class StepRecord:
    index: int
    statement: str
    rule: str
    color: str
    flags: tuple[str, ...]
    certificate: str | None
    blue_premises: tuple[str, ...] = ()


@dataclass
class CheckReport:
    prop_id: str
    profile: str
    verdict: str  # "accepted" | "rejected"
    reject_step: int | None
    reject_cause: str | None
    steps: list[StepRecord]
    hypotheses: list[tuple[str, str, str]]  # (id, statement, flag)
    diorismos: str
    timing_ms: float = 0.0
    certificates: list[dict] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.verdict == "accepted"

    def colors(self) -> list[str]:
        return [s.color for s in self.steps]


def emit_report(r: CheckReport, mode: str = "text", timing: bool = False) -> str:
    if mode == "json":
        doc = {
            "prop_id": r.prop_id,
            "profile": r.profile,
            "verdict": (
                {"status": "accepted"}
                if r.accepted
                else {"status": "rejected", "step": r.reject_step, "cause": r.reject_cause}
            ),
            "diorismos": r.diorismos,
            "hypotheses": [
                {"id": hid, "statement": text, "flag": flag}
                for hid, text, flag in r.hypotheses
            ],
            "steps": [
                {
                    "index": s.index,
                    "statement": s.statement,
                    "rule": s.rule,
                    "color": s.color,
                    "flags": list(s.flags),
                    "certificate": s.certificate,
                }
                for s in r.steps
            ],
        }
        if timing:
            doc["timing_ms"] = r.timing_ms
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    lines = [f"{r.prop_id} [{r.profile}]"]
    for hid, text, flag in r.hypotheses:
        lines.append(f"  {hid}: {text}  (flag: {flag})")
    for s in r.steps:
        extra = f"  ({', '.join(s.flags)})" if s.flags else ""
        blue = f"  (+blue premise: {', '.join(s.blue_premises)})" if s.blue_premises else ""
        lines.append(f"  {s.index:>2}. [{s.color:<7}] {s.statement} ; {s.rule}{extra}{blue}")
    if r.accepted:
        lines.append(f"verdict: Accepted ({len(r.steps)} steps)")
    else:
        lines.append(f"verdict: Rejected at step {r.reject_step}: {r.reject_cause}")
    if timing:
        lines.append(f"timing: {r.timing_ms:.1f} ms")
    return "\n".join(lines) + "\n"
