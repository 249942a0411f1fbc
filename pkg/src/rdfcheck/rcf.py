"""Text format for constraint rows.

A document is a list of `@prefix label: <iri>` lines followed by
`constraint <id> { field: value ; ... }` blocks, one block per row:

    @prefix ex: <http://example.org/>
    constraint captain-min {
      mode: assert ; contextKind: property ; context: ex:Captain ;
      left: ex:commandsVessel ; right: - ; classes: TOP ;
      element: minCard ; value: 1 ; severity: error
    }

Class references are written TOP / BOTTOM / SELF, `{term, ...}` for nominal
sets, `dt:<iri>` for datatypes, `@id` for rows defined elsewhere in the same
document, or a plain (prefixed or bracketed) IRI. Property references are an
IRI, `^iri` for inverse, or `iri/iri/...` for chains. Values are integers,
quoted strings, `{key=value, ...}` maps, or `-` for none.
"""

from __future__ import annotations

import re

from . import rdf
from .model import (
    ClassRef, Constraint, ConstraintError, PropertyRef, Severity,
    ELEMENT_BY_NAME, BOTTOM_REF, SELF_REF, TOP_REF,
    DATATYPE, DEFINED, NAMED, NOMINALS,
)


class RcfSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


_FIELD_NAMES = ("mode", "contextKind", "context", "left", "right",
                "classes", "element", "value", "severity")

_PREFIX_RE = re.compile(
    r"^@prefix\s+([A-Za-z][\w.-]*)?:\s+<([^<>\s]+)>\s*\.?\s*$")
_HEAD_RE = re.compile(r"^constraint\s+([\w.-]+)\s*\{\s*$")
_INT_RE = re.compile(r"^-?\d+$")


def _split_fields(body: str, line: int):
    """Split a block body on `;` that sit outside quotes and braces."""
    fields = []
    buf = []
    depth = 0
    quote = ""
    for ch in body:
        if quote:
            buf.append(ch)
            if ch == quote:
                quote = ""
            continue
        if ch in "'\"":
            quote = ch
            buf.append(ch)
        elif ch == "{":
            depth += 1
            buf.append(ch)
        elif ch == "}":
            depth -= 1
            buf.append(ch)
        elif ch == ";" and depth == 0:
            fields.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    if quote:
        raise RcfSyntaxError("unterminated quote in block", line)
    if depth != 0:
        raise RcfSyntaxError("unbalanced braces in block", line)
    fields.append("".join(buf))
    return [f.strip() for f in fields if f.strip()]


def _split_list(text: str):
    """Split on commas outside quotes/braces/angle brackets."""
    parts = []
    buf = []
    depth = 0
    quote = ""
    for ch in text:
        if quote:
            buf.append(ch)
            if ch == quote:
                quote = ""
            continue
        if ch in "'\"":
            quote = ch
            buf.append(ch)
        elif ch in "{<":
            depth += 1
            buf.append(ch)
        elif ch in "}>":
            depth -= 1
            buf.append(ch)
        elif ch == "," and depth == 0:
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    parts.append("".join(buf))
    return [p.strip() for p in parts if p.strip()]


def _expand_iri(text: str, prefixes: dict, line: int) -> str:
    text = text.strip()
    if text.startswith("<") and text.endswith(">"):
        return text[1:-1]
    if ":" in text:
        label, _, local = text.partition(":")
        if label in prefixes:
            return prefixes[label] + local
        # an absolute IRI written bare (e.g. http://...)
        return text
    if "" in prefixes:
        return prefixes[""] + text
    raise RcfSyntaxError(f"cannot resolve IRI {text!r}", line)


def _parse_term(text: str, prefixes: dict, line: int) -> rdf.Term:
    text = text.strip()
    if text[:1] in "'\"":
        quote = text[0]
        end = text.rfind(quote)
        if end == 0:
            raise RcfSyntaxError(f"bad literal {text!r}", line)
        lexical = text[1:end]
        suffix = text[end + 1:]
        if suffix.startswith("@"):
            return rdf.literal(lexical, lang=suffix[1:])
        if suffix.startswith("^^"):
            return rdf.literal(
                lexical, datatype=_expand_iri(suffix[2:], prefixes, line))
        return rdf.literal(lexical)
    if text.startswith("_:"):
        return rdf.blank(text[2:])
    return rdf.iri(_expand_iri(text, prefixes, line))


def _parse_classref(text: str, prefixes: dict, line: int) -> ClassRef:
    text = text.strip()
    if text == "TOP":
        return TOP_REF
    if text == "BOTTOM":
        return BOTTOM_REF
    if text == "SELF":
        return SELF_REF
    if text.startswith("@"):
        return ClassRef.defined(text[1:])
    if text.startswith("dt:"):
        return ClassRef.datatype(_expand_iri(text[3:], prefixes, line))
    if text.startswith("{") and text.endswith("}"):
        members = [_parse_term(p, prefixes, line)
                   for p in _split_list(text[1:-1])]
        if not members:
            raise RcfSyntaxError("empty nominal set", line)
        return ClassRef.nominals(members)
    return ClassRef.named(_expand_iri(text, prefixes, line))


def _parse_propref(text: str, prefixes: dict, line: int) -> PropertyRef:
    text = text.strip()
    # a chain splits on '/' between steps; '//' inside an IRI scheme is kept
    steps = _split_chain(text)
    if len(steps) > 1:
        return PropertyRef(chain=tuple(
            _parse_single_prop(s, prefixes, line) for s in steps))
    return _parse_single_prop(text, prefixes, line)


def _split_chain(text: str):
    """Split a chain on '/' outside <...> brackets and IRI scheme slashes."""
    parts = []
    buf = []
    in_brackets = False
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "<":
            in_brackets = True
        elif ch == ">":
            in_brackets = False
        if ch == "/" and not in_brackets:
            # "://" or "//" belongs to an unbracketed absolute IRI
            tail = "".join(buf)
            if tail.endswith(":") or tail.endswith("/"):
                buf.append(ch)
                i += 1
                continue
            nxt = text[i + 1:i + 2]
            if nxt == "/":
                buf.append(ch)
                i += 1
                continue
            parts.append(tail)
            buf = []
            i += 1
            continue
        buf.append(ch)
        i += 1
    parts.append("".join(buf))
    return [p for p in parts if p]


def _parse_single_prop(text: str, prefixes: dict, line: int) -> PropertyRef:
    text = text.strip()
    inverse = text.startswith("^")
    if inverse:
        text = text[1:]
    return PropertyRef(iri=_expand_iri(text, prefixes, line), inverse=inverse)


def _parse_value(text: str, prefixes: dict, line: int):
    text = text.strip()
    if text == "-":
        return None
    if _INT_RE.match(text):
        return int(text)
    if text[:1] in "'\"":
        if len(text) < 2 or text[-1] != text[0]:
            raise RcfSyntaxError(f"bad quoted value {text!r}", line)
        return text[1:-1]
    if text.startswith("{") and text.endswith("}"):
        result = {}
        for pair in _split_list(text[1:-1]):
            if "=" not in pair:
                raise RcfSyntaxError(f"bad map entry {pair!r}", line)
            key, _, val = pair.partition("=")
            result[key.strip()] = _parse_value(val.strip(), prefixes, line)
        return result
    if text in ("true", "false"):
        return text == "true"
    # bare word (operator tags like >=, shortcut phrases, IRIs)
    return text


def parse_rcf(text: str):
    """Parse a constraint document into a list of Constraint rows."""
    prefixes: dict = {}
    constraints = []
    seen_ids = set()
    lines = text.split("\n")
    i = 0
    while i < len(lines):
        line_no = i + 1
        stripped = lines[i].strip()
        if not stripped or stripped.startswith("#"):
            i += 1
            continue
        if stripped.startswith("@prefix"):
            m = _PREFIX_RE.match(stripped)
            if not m:
                raise RcfSyntaxError(f"bad prefix line {stripped!r}", line_no)
            prefixes[m.group(1) or ""] = m.group(2)
            i += 1
            continue
        m = _HEAD_RE.match(stripped)
        if not m:
            raise RcfSyntaxError(f"expected constraint block: {stripped!r}",
                                 line_no)
        cid = m.group(1)
        if cid in seen_ids:
            raise RcfSyntaxError(f"duplicate constraint id {cid!r}", line_no)
        seen_ids.add(cid)
        # gather body lines until the closing brace
        body_lines = []
        i += 1
        while i < len(lines):
            candidate = lines[i].strip()
            if candidate == "}":
                break
            body_lines.append(lines[i])
            i += 1
        else:
            raise RcfSyntaxError(f"unterminated block {cid!r}", line_no)
        i += 1
        constraints.append(
            _build_constraint(cid, "\n".join(body_lines), prefixes, line_no))
    return constraints


def _build_constraint(cid: str, body: str, prefixes: dict,
                      line: int) -> Constraint:
    fields: dict = {}
    for chunk in _split_fields(body, line):
        name, colon, rest = chunk.partition(":")
        name = name.strip()
        if not colon or name not in _FIELD_NAMES:
            raise RcfSyntaxError(f"{cid}: bad field {chunk!r}", line)
        if name in fields:
            raise RcfSyntaxError(f"{cid}: duplicate field {name!r}", line)
        fields[name] = rest.strip()

    for required in ("mode", "contextKind", "context", "element"):
        if required not in fields:
            raise RcfSyntaxError(f"{cid}: missing field {required!r}", line)

    element_name = fields["element"]
    if element_name not in ELEMENT_BY_NAME:
        raise RcfSyntaxError(f"{cid}: unknown element {element_name!r}", line)

    def prop_list(name):
        raw = fields.get(name, "-").strip()
        if raw == "-" or not raw:
            return ()
        return tuple(_parse_propref(p, prefixes, line)
                     for p in _split_list(raw))

    raw_classes = fields.get("classes", "-").strip()
    if raw_classes == "-" or not raw_classes:
        classes = ()
    else:
        classes = tuple(_parse_classref(p, prefixes, line)
                        for p in _split_list(raw_classes))

    severity = Severity.ERROR
    if "severity" in fields:
        try:
            severity = Severity.parse(fields["severity"])
        except KeyError:
            raise RcfSyntaxError(
                f"{cid}: unknown severity {fields['severity']!r}", line)

    try:
        return Constraint(
            id=cid,
            mode=fields["mode"],
            context_kind=fields["contextKind"],
            context=_parse_classref(fields["context"], prefixes, line),
            left=prop_list("left"),
            right=prop_list("right"),
            classes=classes,
            element=ELEMENT_BY_NAME[element_name],
            value=_parse_value(fields.get("value", "-"), prefixes, line),
            severity=severity,
        )
    except ConstraintError as exc:
        raise RcfSyntaxError(str(exc), line) from exc


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _term_out(t: rdf.Term) -> str:
    if t.kind == rdf.IRI:
        return f"<{t.iri}>"
    if t.kind == rdf.BLANK:
        return f"_:{t.label}"
    out = '"' + t.lexical + '"'
    if t.lang:
        return out + "@" + t.lang
    if t.datatype != rdf.XSD_STRING:
        return out + f"^^<{t.datatype}>"
    return out


def _classref_out(ref: ClassRef) -> str:
    if ref.kind == NAMED:
        return f"<{ref.iri}>"
    if ref.kind == DEFINED:
        return f"@{ref.label}"
    if ref.kind == NOMINALS:
        inner = ", ".join(sorted(_term_out(m) for m in ref.members))
        return "{" + inner + "}"
    if ref.kind == DATATYPE:
        return f"dt:<{ref.iri}>"
    return ref.kind.upper()   # TOP / BOTTOM / SELF


def _propref_out(ref: PropertyRef) -> str:
    if ref.chain:
        return "/".join(_propref_out(s) for s in ref.chain)
    prefix = "^" if ref.inverse else ""
    return f"{prefix}<{ref.iri}>"


def _value_out(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, dict):
        inner = ", ".join(f"{k}={_value_out(v)}" for k, v in value.items())
        return "{" + inner + "}"
    text = str(value)
    if text in ("-",) or _INT_RE.match(text):
        return "'" + text + "'"
    quote = '"' if "'" in text else "'"
    return quote + text + quote


def serialize_rcf(constraints) -> str:
    """Render rows so that parse_rcf gives back a structurally equal list."""
    blocks = []
    for c in constraints:
        fields = [
            ("mode", c.mode),
            ("contextKind", c.context_kind),
            ("context", _classref_out(c.context)),
            ("left", ", ".join(_propref_out(p) for p in c.left) or "-"),
            ("right", ", ".join(_propref_out(p) for p in c.right) or "-"),
            ("classes", ", ".join(_classref_out(r) for r in c.classes) or "-"),
            ("element", c.element.value),
            ("value", _value_out(c.value)),
            ("severity", c.severity.name.lower()),
        ]
        body = " ;\n".join(f"  {name}: {val}" for name, val in fields)
        blocks.append(f"constraint {c.id} {{\n{body}\n}}")
    return "\n\n".join(blocks) + ("\n" if blocks else "")
