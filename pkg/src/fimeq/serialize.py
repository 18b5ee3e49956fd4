"""Text and JSON forms for equation systems, assignments, and verdicts.

Typed systems:

    letters: a b
    vars: X:gen E1:idem x:red
    XE1 = a~aX

The letters header declares base letters; the involuted forms ~a, ~b come
with them.  Variable kinds are gen, idem, red; equation sides juxtapose
letters and variable names, with ~X for an involuted occurrence and eps for
an empty side.  Sides are scanned greedily, longest name first, so a
variable named like the concatenation of two other tokens would be
ambiguous; the formatter re-reads its own output and rejects such systems
instead of emitting them.

Language systems:

    letters: a b
    interp: group
    coeffs-over: a b
    {eps,a~a} + a~a.X + b~b.Y = {b~b} + a~a.Y + b~b.X
    marked: {eps} + a.X <= {a} + a.Y

A term is one optional braced constant set plus coefficient.Variable
summands; <= marks an inequality, a marked: prefix the monoid-checked
equations, and coeffs-over restricts constants and coefficients to the
listed letters.  A vars: header (names only) declares variables that need
not occur in any equation.

Both formats have JSON mirrors with explicit token arrays; parse of either
emission returns an equal system.  Blank lines and # comments are ignored.
"""

from __future__ import annotations

import json
from typing import Mapping

from .equations import EqWord, TypedSystem, VarSymbol
from .errors import InvalidInput, ParseError
from .fim import ScheiblichPair, format_pair
from .langeq import LangEquation, LangSystem, LangTerm, lang_var
from .solver import Verdict
from .words import (
    EPSILON_TOKEN,
    InvAlphabet,
    ReducedWord,
    Word,
    WordSet,
    format_word,
    parse_reduced,
    parse_word,
)

KIND_CODES = {"general": "gen", "idempotent": "idem", "reduced": "red"}
CODE_KINDS = {code: kind for kind, code in KIND_CODES.items()}

# characters with a meaning in the grammar; names and letters may not use
# them (# is fine: comments start only at a whitespace-preceded #, and the
# transformation stages put # inside fresh variable names)
_RESERVED = set("=<>.,{}+:~ \t")


def _check_symbol(name: str, what: str, line: int | None = None) -> None:
    if not name or any(c in _RESERVED for c in name):
        raise ParseError(f"bad {what} {name!r}", line)


def _strip_comment(raw: str) -> str:
    for i, c in enumerate(raw):
        if c == "#" and (i == 0 or raw[i - 1].isspace()):
            return raw[:i]
    return raw


def _lines(text: str) -> list[tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = _strip_comment(raw).strip()
        if stripped:
            out.append((lineno, stripped))
    return out


def _header(line: str) -> tuple[str, str] | None:
    for key in ("letters", "interp", "coeffs-over", "vars"):
        if line.startswith(key + ":"):
            return key, line[len(key) + 1 :].strip()
    return None


def _base_letters(alphabet: InvAlphabet) -> list[str]:
    """The base tokens of a paired alphabet; rejects any other shape."""
    if alphabet.size % 2 != 0:
        raise InvalidInput("file formats need a paired letters alphabet")
    base = []
    for i in range(0, alphabet.size, 2):
        tok = alphabet.tokens[i]
        if alphabet.bar_of[i] != i + 1 or alphabet.tokens[i + 1] != "~" + tok:
            raise InvalidInput("file formats need a paired letters alphabet")
        _check_symbol(tok, "letter")
        base.append(tok)
    return base


def _parse_letters(value: str, line: int) -> InvAlphabet:
    names = value.split()
    if not names:
        raise ParseError("letters header declares no letters", line)
    for name in names:
        _check_symbol(name, "letter", line)
    if len(set(names)) != len(names):
        raise ParseError("repeated letter", line)
    return InvAlphabet.from_base(tuple(names))


# ---------------------------------------------------------------------------
# typed systems


def _token_table(alphabet: InvAlphabet, variables: tuple[VarSymbol, ...]):
    table: dict[str, object] = {tok: i for i, tok in enumerate(alphabet.tokens)}
    for v in variables:
        forms = [(v.name, v)]
        if v.kind != "idempotent":
            forms.append(("~" + v.name, v.bar()))
        for text, token in forms:
            if text in table:
                raise ParseError(f"name {text!r} collides with another symbol")
            table[text] = token
    order = sorted(table, key=len, reverse=True)
    return table, order


def _scan_side(table, order, text: str, line: int | None) -> tuple:
    if text == EPSILON_TOKEN:
        return ()
    tokens = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        for form in order:
            if text.startswith(form, i):
                tokens.append(table[form])
                i += len(form)
                break
        else:
            raise ParseError(f"cannot read a token at {text[i:]!r}", line, i + 1)
    return tuple(tokens)


def format_typed_system(system: TypedSystem) -> str:
    base = _base_letters(system.alphabet)
    for v in system.variables:
        _check_symbol(v.name, "variable name")
    table, order = _token_table(system.alphabet, system.variables)
    lines = ["letters: " + " ".join(base)]
    if system.variables:
        decls = " ".join(f"{v.name}:{KIND_CODES[v.kind]}" for v in system.variables)
        lines.append("vars: " + decls)
    for lhs, rhs in system.equations:
        sides = []
        for side in (lhs, rhs):
            text = _format_side(side)
            if _scan_side(table, order, text, None) != side.tokens:
                raise InvalidInput("variable names make juxtaposed tokens ambiguous")
            sides.append(text)
        lines.append(f"{sides[0]} = {sides[1]}")
    return "\n".join(lines) + "\n"


def _format_side(side: EqWord) -> str:
    if not side.tokens:
        return EPSILON_TOKEN
    parts = []
    for t in side.tokens:
        parts.append(side.alphabet.tokens[t] if isinstance(t, int) else t.display())
    return "".join(parts)


def parse_typed_system(text: str) -> TypedSystem:
    alphabet: InvAlphabet | None = None
    variables: tuple[VarSymbol, ...] = ()
    table: dict | None = None
    order: list[str] = []
    equations: list[tuple[EqWord, EqWord]] = []
    for lineno, line in _lines(text):
        header = _header(line)
        if header is not None:
            key, value = header
            if equations:
                raise ParseError(f"{key} header after the first equation", lineno)
            if key == "letters":
                alphabet = _parse_letters(value, lineno)
            elif key == "vars":
                variables = tuple(_parse_var_decl(part, lineno) for part in value.split())
            else:
                raise ParseError(f"{key} header belongs to language systems", lineno)
            continue
        if alphabet is None:
            raise ParseError("equation before the letters header", lineno)
        if table is None:
            try:
                table, order = _token_table(alphabet, variables)
            except ParseError as err:
                raise ParseError(str(err), lineno) from None
        if line.count("=") != 1:
            raise ParseError("an equation needs exactly one =", lineno)
        left, right = (part.strip() for part in line.split("="))
        sides = tuple(
            EqWord(alphabet, _scan_side(table, order, part, lineno))
            for part in (left, right)
        )
        equations.append(sides)
    if alphabet is None:
        raise ParseError("missing letters header")
    return TypedSystem(alphabet, variables, tuple(equations))


def _parse_var_decl(part: str, lineno: int) -> VarSymbol:
    name, sep, code = part.partition(":")
    if not sep or code not in CODE_KINDS:
        raise ParseError(f"variable declaration {part!r} is not name:gen|idem|red", lineno)
    _check_symbol(name, "variable name", lineno)
    try:
        return VarSymbol(name, CODE_KINDS[code])
    except InvalidInput as err:
        raise ParseError(str(err), lineno) from None


def typed_system_to_json(system: TypedSystem) -> dict:
    def token(t) -> object:
        if isinstance(t, int):
            return system.alphabet.tokens[t]
        return {"var": t.name, "barred": t.barred}

    return {
        "letters": _base_letters(system.alphabet),
        "vars": [{"name": v.name, "kind": v.kind} for v in system.variables],
        "equations": [
            {"lhs": [token(t) for t in lhs.tokens], "rhs": [token(t) for t in rhs.tokens]}
            for lhs, rhs in system.equations
        ],
    }


def typed_system_from_json(obj: object) -> TypedSystem:
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object")
    try:
        alphabet = InvAlphabet.from_base(tuple(obj["letters"]))
        variables = tuple(VarSymbol(v["name"], v["kind"]) for v in obj.get("vars", ()))
        by_name = {v.name: v for v in variables}
        equations = []
        for eq in obj.get("equations", ()):
            sides = []
            for key in ("lhs", "rhs"):
                tokens = []
                for t in eq[key]:
                    if isinstance(t, str):
                        tokens.append(alphabet.index(t))
                    else:
                        v = by_name[t["var"]]
                        tokens.append(v.bar() if t.get("barred") else v)
                sides.append(EqWord(alphabet, tuple(tokens)))
            equations.append((sides[0], sides[1]))
        return TypedSystem(alphabet, variables, tuple(equations))
    except KeyError as err:
        raise ParseError(f"missing key {err}") from None
    except (TypeError, InvalidInput) as err:
        raise ParseError(str(err)) from None


# ---------------------------------------------------------------------------
# language systems


def format_lang_system(system: LangSystem) -> str:
    base = _base_letters(system.alphabet)
    lines = ["letters: " + " ".join(base), "interp: " + system.interp]
    if system.coeff_letters is not None:
        toks = [system.alphabet.tokens[i] for i in sorted(system.coeff_letters)]
        lines.append("coeffs-over: " + " ".join(toks))
    if system.declared_vars:
        for v in system.declared_vars:
            _check_symbol(v.name, "variable name")
        lines.append("vars: " + " ".join(v.name for v in system.declared_vars))
    for eq in system.equations:
        rel = "<=" if eq.inequality else "="
        head = "marked: " if eq.marked else ""
        lines.append(f"{head}{_format_term(eq.lhs)} {rel} {_format_term(eq.rhs)}")
    return "\n".join(lines) + "\n"


def _format_term(t: LangTerm) -> str:
    for _, v in t.summands:
        _check_symbol(v.name, "variable name")
    parts = ["{" + ",".join(format_word(w) for w in t.constant) + "}"]
    parts.extend(f"{format_word(coeff)}.{v.name}" for coeff, v in t.summands)
    return " + ".join(parts)


def _parse_term(alphabet: InvAlphabet, text: str, lineno: int) -> LangTerm:
    constant: WordSet | None = None
    summands: list[tuple[Word, VarSymbol]] = []
    if not text.strip():
        raise ParseError("empty term", lineno)
    for piece in text.split("+"):
        piece = piece.strip()
        if piece.startswith("{"):
            if not piece.endswith("}"):
                raise ParseError(f"unclosed constant set {piece!r}", lineno)
            if constant is not None:
                raise ParseError("a term has at most one constant set", lineno)
            inner = piece[1:-1].strip()
            members = [p.strip() for p in inner.split(",")] if inner else []
            if any(not p for p in members):
                raise ParseError("empty member in a constant set", lineno)
            constant = WordSet(alphabet, [_word(alphabet, p, lineno) for p in members])
        elif "." in piece:
            coeff_text, _, name = piece.partition(".")
            _check_symbol(name, "variable name", lineno)
            summands.append((_word(alphabet, coeff_text.strip(), lineno), lang_var(name)))
        else:
            raise ParseError(f"expected {{...}} or coefficient.Variable, got {piece!r}", lineno)
    if constant is None:
        constant = WordSet(alphabet, ())
    return LangTerm(alphabet, constant, tuple(summands))


def _word(alphabet: InvAlphabet, text: str, lineno: int) -> Word:
    try:
        return parse_word(alphabet, text)
    except InvalidInput as err:
        raise ParseError(str(err), lineno) from None


def parse_lang_system(text: str) -> LangSystem:
    alphabet: InvAlphabet | None = None
    interp: str | None = None
    coeff_letters: frozenset[int] | None = None
    declared: tuple[VarSymbol, ...] = ()
    equations: list[LangEquation] = []
    for lineno, line in _lines(text):
        header = _header(line)
        if header is not None:
            key, value = header
            if equations:
                raise ParseError(f"{key} header after the first equation", lineno)
            if key == "letters":
                alphabet = _parse_letters(value, lineno)
            elif key == "interp":
                interp = value
            elif key == "vars":
                for name in value.split():
                    _check_symbol(name, "variable name", lineno)
                declared = tuple(lang_var(name) for name in value.split())
            else:
                if alphabet is None:
                    raise ParseError("coeffs-over before the letters header", lineno)
                indices = set()
                for tok in value.split():
                    if tok not in alphabet.tokens:
                        raise ParseError(f"coefficient letter {tok!r} not declared", lineno)
                    indices.add(alphabet.index(tok))
                coeff_letters = frozenset(indices)
            continue
        if alphabet is None:
            raise ParseError("equation before the letters header", lineno)
        marked = line.startswith("marked:")
        if marked:
            line = line[len("marked:") :].strip()
        inequality = "<=" in line
        sep = "<=" if inequality else "="
        if line.count(sep) != 1:
            raise ParseError(f"an equation needs exactly one {sep}", lineno)
        left, right = (part.strip() for part in line.split(sep))
        try:
            equations.append(
                LangEquation(
                    _parse_term(alphabet, left, lineno),
                    _parse_term(alphabet, right, lineno),
                    marked=marked,
                    inequality=inequality,
                )
            )
        except InvalidInput as err:
            raise ParseError(str(err), lineno) from None
    if alphabet is None:
        raise ParseError("missing letters header")
    if interp is None:
        raise ParseError("missing interp header")
    try:
        return LangSystem(alphabet, tuple(equations), interp, coeff_letters, declared)
    except InvalidInput as err:
        raise ParseError(str(err)) from None


def lang_system_to_json(system: LangSystem) -> dict:
    def term(t: LangTerm) -> dict:
        return {
            "constant": [format_word(w) for w in t.constant],
            "summands": [{"coeff": format_word(c), "var": v.name} for c, v in t.summands],
        }

    coeffs = None
    if system.coeff_letters is not None:
        coeffs = [system.alphabet.tokens[i] for i in sorted(system.coeff_letters)]
    return {
        "letters": _base_letters(system.alphabet),
        "interp": system.interp,
        "coeffs-over": coeffs,
        "vars": [v.name for v in system.declared_vars],
        "equations": [
            {
                "lhs": term(eq.lhs),
                "rhs": term(eq.rhs),
                "marked": eq.marked,
                "inequality": eq.inequality,
            }
            for eq in system.equations
        ],
    }


def lang_system_from_json(obj: object) -> LangSystem:
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object")

    def term(alphabet: InvAlphabet, data: dict) -> LangTerm:
        constant = WordSet(alphabet, [parse_word(alphabet, w) for w in data["constant"]])
        summands = tuple(
            (parse_word(alphabet, s["coeff"]), lang_var(s["var"])) for s in data["summands"]
        )
        return LangTerm(alphabet, constant, summands)

    try:
        alphabet = InvAlphabet.from_base(tuple(obj["letters"]))
        coeffs = obj.get("coeffs-over")
        coeff_letters = (
            None if coeffs is None else frozenset(alphabet.index(t) for t in coeffs)
        )
        declared = tuple(lang_var(name) for name in obj.get("vars", ()))
        equations = tuple(
            LangEquation(
                term(alphabet, eq["lhs"]),
                term(alphabet, eq["rhs"]),
                marked=bool(eq.get("marked")),
                inequality=bool(eq.get("inequality")),
            )
            for eq in obj.get("equations", ())
        )
        return LangSystem(alphabet, equations, obj["interp"], coeff_letters, declared)
    except KeyError as err:
        raise ParseError(f"missing key {err}") from None
    except (TypeError, InvalidInput) as err:
        raise ParseError(str(err)) from None


# ---------------------------------------------------------------------------
# dispatch, assignments, verdicts


def format_system(system: "TypedSystem | LangSystem") -> str:
    if isinstance(system, TypedSystem):
        return format_typed_system(system)
    return format_lang_system(system)


def system_to_json(system: "TypedSystem | LangSystem") -> dict:
    if isinstance(system, TypedSystem):
        return typed_system_to_json(system)
    return lang_system_to_json(system)


def load_system(text: str) -> "TypedSystem | LangSystem":
    """Parse either system format, sniffing JSON and the interp header."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as err:
            raise ParseError(err.msg, err.lineno, err.colno) from None
        if isinstance(obj, dict) and "interp" in obj:
            return lang_system_from_json(obj)
        return typed_system_from_json(obj)
    for _, line in _lines(text):
        if line.startswith("interp:"):
            return parse_lang_system(text)
    return parse_typed_system(text)


def parse_group_assignment(
    text: str, system: TypedSystem
) -> dict[VarSymbol, ReducedWord]:
    """Read name = reduced-word lines against a system's declarations."""
    by_name = {v.name: v for v in system.variables}
    gamma: dict[VarSymbol, ReducedWord] = {}
    for lineno, line in _lines(text):
        if line.count("=") != 1:
            raise ParseError("an assignment line needs exactly one =", lineno)
        name, _, value = (part.strip() for part in line.partition("="))
        if name not in by_name:
            raise ParseError(f"{name!r} is not a declared variable", lineno)
        if by_name[name] in gamma:
            raise ParseError(f"{name!r} assigned twice", lineno)
        try:
            gamma[by_name[name]] = parse_reduced(system.alphabet, value)
        except InvalidInput as err:
            raise ParseError(str(err), lineno) from None
    return gamma


def value_to_json(value: object) -> object:
    if isinstance(value, ReducedWord):
        return format_word(value)
    if isinstance(value, ScheiblichPair):
        return {
            "tree": [format_word(w) for w in value.tree],
            "group": format_word(value.group),
        }
    if isinstance(value, WordSet):
        return [format_word(w) for w in value]
    raise InvalidInput(f"no JSON form for {type(value).__name__}")


def format_value(value: object) -> str:
    if isinstance(value, ReducedWord):
        return format_word(value)
    if isinstance(value, ScheiblichPair):
        return format_pair(value)
    if isinstance(value, WordSet):
        return "{" + ",".join(format_word(w) for w in value) + "}"
    raise InvalidInput(f"no text form for {type(value).__name__}")


def witness_to_json(witness: Mapping) -> dict:
    return {v.display(): value_to_json(value) for v, value in witness.items()}


def verdict_to_json(verdict: Verdict) -> dict:
    witness = None
    if verdict.witness is not None:
        witness = witness_to_json(verdict.witness)
    return {"status": verdict.status, "witness": witness, "trace": list(verdict.trace)}
