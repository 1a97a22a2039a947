"""Scenario description language: tokenizer, parser and canonical serializer.

Grammar::

    scenario   := "scenario" STRING decl*
    decl       := group | link | picture | situation | goal | query | attention
    group      := "group" ID ["size" INT] ["feature" features]
    link       := "link" ID ("->" | "-|") ID ":" NUMBER ["kind" ID]
    picture    := "picture" ID "{" "parts" ":" ids ["features" ":" features] "}"
    situation  := "situation" ["case" (ID | INT)] "{" [features] "}"
    goal       := "goal" feature "weight" NUMBER
    query      := "query" "if" features "then" features
    attention  := "attention" "focus" "{" ids "}" ["off-gain" NUMBER]
    features   := feature ("," feature)*
    feature    := ["!"] ID
    ids        := ID ("," ID)*

``->`` is an excitatory link, ``-|`` an inhibitory one.  ``#`` starts a
comment running to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .pictures import Feature
from .scenario import (AttentionDecl, Diagnostic, GoalDecl, GroupDecl, LinkDecl, Loc,
                       PictureDecl, QueryDecl, Scenario, ScenarioError, SituationDecl, validate)
from .substrate import Polarity, SynapseKind

MAX_DIAGNOSTICS = 20

DECL_KEYWORDS = ("group", "link", "picture", "situation", "goal", "query", "attention")

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<arrow>->|-\|)
  | (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*)
  | (?P<punct>[{}:,!])
""", re.VERBOSE)


@dataclass(frozen=True)
class ScenarioSource:
    text: str
    origin: str = "<inline>"


@dataclass(frozen=True)
class Token:
    kind: str  # id, number, string, arrow, punct, eof
    value: str
    line: int
    column: int
    first_on_line: bool = False

    @property
    def loc(self) -> Loc:
        return Loc(self.line, self.column)


class _Syntax(Exception):
    def __init__(self, tok: Token, message: str):
        self.tok = tok
        self.message = message


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    line, line_start, pos = 1, 0, 0
    fresh = True
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            diags.append(Diagnostic(line, col, f"unexpected character {text[pos]!r}", "syntax"))
            pos += 1
            continue
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
            fresh = True
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, col, fresh))
            fresh = False
        pos = m.end()
    if tokens:
        # report "end of input" just past the last real token, not on a phantom line
        last = tokens[-1]
        tokens.append(Token("eof", "", last.line, last.column + len(last.value), True))
    else:
        tokens.append(Token("eof", "", 1, 1, True))
    return tokens, diags


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0
        self.diags: list[Diagnostic] = []
        self.name = ""
        self.groups: list[GroupDecl] = []
        self.links: list[LinkDecl] = []
        self.pictures: list[PictureDecl] = []
        self.situations: list[SituationDecl] = []
        self.goals: list[GoalDecl] = []
        self.queries: list[QueryDecl] = []
        self.attentions: list[AttentionDecl] = []

    # -- token helpers --------------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, value: str) -> bool:
        return self.tok.kind in ("id", "punct", "arrow") and self.tok.value == value

    def expect(self, value: str) -> Token:
        if not self.at(value):
            raise _Syntax(self.tok, f"expected {value!r}, found {self._describe(self.tok)}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        # a declaration keyword opening a line ends the current declaration
        if self.tok.kind != kind or (kind == "id" and self._at_decl_start()):
            raise _Syntax(self.tok, f"expected {what}, found {self._describe(self.tok)}")
        return self.advance()

    @staticmethod
    def _describe(t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.value)

    def number(self) -> tuple[float, Token]:
        t = self.expect_kind("number", "a number")
        return float(t.value), t

    def feature(self) -> tuple[Feature, Token]:
        start = self.tok
        denied = False
        if self.at("!"):
            self.advance()
            denied = True
        t = self.expect_kind("id", "a feature name")
        return Feature(t.value, not denied), start

    def feature_list(self, allow_empty: bool = False) -> list[tuple[Feature, Token]]:
        if allow_empty and not (self.at("!") or self.tok.kind == "id"):
            return []
        out = [self.feature()]
        while self.at(","):
            self.advance()
            out.append(self.feature())
        return out

    def id_list(self) -> list[Token]:
        out = [self.expect_kind("id", "an identifier")]
        while self.at(","):
            self.advance()
            out.append(self.expect_kind("id", "an identifier"))
        return out

    def _at_decl_start(self) -> bool:
        t = self.tok
        return t.first_on_line and t.kind == "id" and t.value in DECL_KEYWORDS

    def sync(self):
        """Skip to the next declaration keyword that starts a line."""
        self.advance()
        while self.tok.kind != "eof" and not self._at_decl_start():
            self.advance()

    # -- grammar -------------------------------------------------------------------------

    def parse(self):
        try:
            self.expect("scenario")
            self.name = _unquote(self.expect_kind("string", "a quoted scenario name").value)
        except _Syntax as e:
            self.error(e)
            if self.tok.kind != "eof" and not (self.tok.kind == "id" and self.tok.value in DECL_KEYWORDS):
                self.sync()
        while self.tok.kind != "eof":
            t = self.tok
            start = self.i
            try:
                if t.kind == "id" and t.value in DECL_KEYWORDS:
                    getattr(self, "decl_" + t.value)()
                else:
                    raise _Syntax(t, f"expected a declaration, found {self._describe(t)}")
            except _Syntax as e:
                self.error(e)
                if self.i > start and self._at_decl_start():
                    continue  # the error was detected at the next declaration
                self.sync()

    def error(self, e: _Syntax):
        self.diags.append(Diagnostic(e.tok.line, e.tok.column, e.message, "syntax"))

    def decl_group(self):
        self.advance()
        name = self.expect_kind("id", "a group name")
        size, size_tok = 1, None
        feats: list[tuple[Feature, Token]] = []
        if self.at("size"):
            self.advance()
            value, size_tok = self.number()
            if not float(value).is_integer():
                raise _Syntax(size_tok, f"group size must be an integer, found {size_tok.value!r}")
            size = int(value)
        if self.at("feature"):
            self.advance()
            feats = self.feature_list()
        self.groups.append(GroupDecl(name.value, size, tuple(f for f, _ in feats), name.loc,
                                     size_tok.loc if size_tok else None))

    def decl_link(self):
        kw = self.advance()
        src = self.expect_kind("id", "a group name")
        arrow = self.expect_kind("arrow", "'->' or '-|'")
        dst = self.expect_kind("id", "a group name")
        self.expect(":")
        weight, wtok = self.number()
        kind = None
        if self.at("kind"):
            self.advance()
            ktok = self.expect_kind("id", "a connection kind")
            try:
                kind = SynapseKind(ktok.value)
            except ValueError:
                self.diags.append(Diagnostic(
                    ktok.line, ktok.column,
                    f"unknown connection kind {ktok.value!r}; expected one of "
                    + ", ".join(k.value for k in SynapseKind), "range"))
        polarity = Polarity.EXCITATORY if arrow.value == "->" else Polarity.INHIBITORY
        self.links.append(LinkDecl(src.value, dst.value, polarity, weight, kind, kw.loc,
                                   src.loc, dst.loc, wtok.loc))

    def decl_picture(self):
        self.advance()
        name = self.expect_kind("id", "a picture name")
        self.expect("{")
        self.expect("parts")
        self.expect(":")
        parts = self.id_list()
        feats: list[tuple[Feature, Token]] = []
        if self.at("features"):
            self.advance()
            self.expect(":")
            feats = self.feature_list()
        self.expect("}")
        self.pictures.append(PictureDecl(name.value, tuple(p.value for p in parts),
                                         tuple(f for f, _ in feats), name.loc,
                                         tuple(p.loc for p in parts)))

    def decl_situation(self):
        kw = self.advance()
        case = None
        loc = kw.loc
        if self.at("case"):
            self.advance()
            if self.tok.kind not in ("id", "number"):
                raise _Syntax(self.tok, f"expected a case id, found {self._describe(self.tok)}")
            ctok = self.advance()
            case, loc = ctok.value, ctok.loc
        self.expect("{")
        feats = self.feature_list(allow_empty=True)
        self.expect("}")
        self.situations.append(SituationDecl(tuple(f for f, _ in feats), case, loc))

    def decl_goal(self):
        self.advance()
        feat, ftok = self.feature()
        self.expect("weight")
        weight, wtok = self.number()
        self.goals.append(GoalDecl(feat, weight, ftok.loc, wtok.loc))

    def decl_query(self):
        kw = self.advance()
        self.expect("if")
        ante = self.feature_list()
        self.expect("then")
        cons = self.feature_list()
        if self.queries:
            self.diags.append(Diagnostic(kw.line, kw.column, "only one query is allowed", "arity"))
            return
        locs = tuple((f, t.loc) for f, t in (*ante, *cons))
        self.queries.append(QueryDecl(tuple(f for f, _ in ante), tuple(f for f, _ in cons),
                                      kw.loc, locs))

    def decl_attention(self):
        kw = self.advance()
        self.expect("focus")
        self.expect("{")
        ids = self.id_list()
        self.expect("}")
        gain, gtok = 0.0, None
        if self.at("off-gain"):
            self.advance()
            gain, gtok = self.number()
        if self.attentions:
            self.diags.append(Diagnostic(kw.line, kw.column, "only one attention declaration is allowed",
                                         "arity"))
            return
        self.attentions.append(AttentionDecl(tuple(t.value for t in ids), gain, kw.loc,
                                             tuple(t.loc for t in ids), gtok.loc if gtok else None))


def _unquote(s: str) -> str:
    body = s[1:-1]
    return re.sub(r"\\(.)", r"\1", body)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def parse(src: ScenarioSource | str, origin: str | None = None) -> Scenario:
    """Parse and validate scenario text.

    Raises :class:`ScenarioError` carrying up to 20 diagnostics, earliest first.
    """
    if isinstance(src, str):
        src = ScenarioSource(src, origin or "<inline>")
    tokens, diags = tokenize(src.text)
    p = _Parser(tokens)
    p.parse()
    diags.extend(p.diags)
    scenario = Scenario(
        p.name, tuple(p.groups), tuple(p.links), tuple(p.pictures), tuple(p.situations),
        tuple(p.goals), p.queries[0] if p.queries else None,
        p.attentions[0] if p.attentions else None, origin=src.origin)
    diags.extend(validate(scenario))
    if diags:
        diags = sorted(set(diags), key=lambda d: (d.line, d.column, d.kind, d.message))
        raise ScenarioError(diags[:MAX_DIAGNOSTICS], src.origin)
    return scenario


def load(path: str | Path) -> Scenario:
    path = Path(path)
    return parse(ScenarioSource(path.read_text(encoding="utf-8"), str(path)))


def _num(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _feats(fs) -> str:
    return ", ".join(str(f) for f in fs)


def serialize(s: Scenario) -> str:
    """Canonical text: declarations grouped by kind, each kind sorted by id."""
    out = [f"scenario {_quote(s.name)}"]

    def block(lines):
        if lines:
            out.append("")
            out.extend(lines)

    block([
        f"group {g.name}" + (f" size {g.size}" if g.size != 1 else "")
        + (f" feature {_feats(g.features)}" if g.features else "")
        for g in s.groups])
    block([
        f"link {l.source} {l.polarity.arrow} {l.target} : {_num(l.weight)}"
        + (f" kind {l.kind.value}" if l.kind is not None else "")
        for l in s.links])
    block([
        f"picture {p.name} {{ parts: {', '.join(p.parts)}"
        + (f" features: {_feats(p.features)}" if p.features else "") + " }"
        for p in s.pictures])
    block([
        "situation" + (f" case {x.case}" if x.case is not None else "")
        + (f" {{ {_feats(x.features)} }}" if x.features else " { }")
        for x in s.situations])
    block([f"goal {g.feature} weight {_num(g.weight)}" for g in s.goals])
    tail = []
    if s.query is not None:
        tail.append(f"query if {_feats(s.query.antecedent)} then {_feats(s.query.consequent)}")
    if s.attention is not None:
        a = s.attention
        tail.append(f"attention focus {{ {', '.join(a.focus)} }} off-gain {_num(a.off_gain)}")
    block(tail)
    return "\n".join(out) + "\n"


_EPISODE_RE = re.compile(
    r"^\s*co-active\s*:\s*(?P<groups>[^\[#]*?)\s*(?:\[\s*duration\s+(?P<dur>\S+)\s*\])?\s*(?:#.*)?$")
_ID_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*$")


def parse_episodes(text: str, origin: str = "<episodes>", groups=None):
    """Episode lines ``co-active: ID, ID [duration N]``; blank lines and ``#`` comments skipped.

    ``groups``, when given, is the set of known group names to check against.
    """
    from .learning import Episode

    episodes = []
    diags: list[Diagnostic] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _EPISODE_RE.match(line)
        if m is None:
            col = len(line) - len(line.lstrip()) + 1
            diags.append(Diagnostic(lineno, col, "expected 'co-active: ID, ID [duration N]'",
                                    "syntax"))
            continue
        names = []
        offset = m.start("groups")
        bad = False
        for piece in re.finditer(r"[^,]+", m.group("groups")):
            name = piece.group().strip()
            col = offset + piece.start() + (len(piece.group()) - len(piece.group().lstrip())) + 1
            if not _ID_RE.match(name):
                diags.append(Diagnostic(lineno, col, f"bad group name {name!r}", "syntax"))
                bad = True
            elif groups is not None and name not in groups:
                diags.append(Diagnostic(lineno, col, f"undeclared group {name!r}",
                                        "unknown-reference"))
                bad = True
            names.append(name)
        duration = 1
        if m.group("dur") is not None:
            col = m.start("dur") + 1
            try:
                duration = int(m.group("dur"))
            except ValueError:
                diags.append(Diagnostic(lineno, col, "duration must be an integer", "syntax"))
                bad = True
            else:
                if duration < 1:
                    diags.append(Diagnostic(lineno, col, "duration must be >= 1", "range"))
                    bad = True
        if not names:
            diags.append(Diagnostic(lineno, 1, "episode lists no groups", "arity"))
            bad = True
        if not bad:
            episodes.append(Episode(frozenset(names), (), duration))
    if diags:
        raise ScenarioError(diags[:MAX_DIAGNOSTICS], origin)
    return episodes
