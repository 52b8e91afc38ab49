"""Text formats: a native line format and a subset of HOA v1.

Native NSA::

    # comment
    nsa n=2 k=1 sigma=2 basis=state
    letters a b
    init 0
    t 0 a 1
    pair 1 G=1 B=0

State lists are comma separated, ``-`` is the empty list.  Transition-based
pairs list edges as ``src:letter:dst``.  ``basis`` defaults to ``state``.

Native deterministic automata::

    drta n=1 k=1 mu=1 sigma=1 states=1
    init 0
    sink 1
    state 0 H:1,2,1;1,0,0
    t 0 0 0 acc=ε rej=1^1

``dpta`` transitions carry ``p=<priority>``; ``dra`` states carry
``F=<names> E=<names>``.  ``variant``, ``letters`` and ``sink`` are
optional.

HOA output covers alphabets of size ``2^m`` only: letter ``a`` is the
minterm over ``m`` propositions in which ``p_i`` holds iff bit ``i`` of ``a``
is set.  Labels must be full minterms (or ``t`` when ``m = 0``).
"""
from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple

from .errors import DomainError, ParseError, SemanticError, StreettDetError, UnsupportedFeatureError
from .omega import (
    DPTA,
    DRA,
    DRTA,
    STATE,
    TRANSITION,
    Alphabet,
    DetTransitionAutomaton,
    StreettNSA,
    format_name,
    name_sort_key,
    parse_name,
)

NATIVE = "native"
HOA = "hoa"


# ---------------------------------------------------------------------------
# tokenizing


class _Line:
    __slots__ = ("number", "tokens")

    def __init__(self, number: int, tokens: List[Tuple[int, str]]):
        self.number = number
        self.tokens = tokens  # (1-based column, text)

    @property
    def head(self) -> str:
        return self.tokens[0][1]

    def error(self, message: str, index: int = 0, cls=ParseError):
        column = self.tokens[index][0] if index < len(self.tokens) else 1
        return cls(message, self.number, column)


def _native_lines(text: str) -> List[_Line]:
    out = []
    for number, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        tokens = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", body)]
        if tokens:
            out.append(_Line(number, tokens))
    return out


def _int(line: _Line, index: int, text: Optional[str] = None) -> int:
    value = line.tokens[index][1] if text is None else text
    if not re.fullmatch(r"-?\d+", value):
        raise line.error(f"expected an integer, found {value!r}", index)
    return int(value)


def _keyvals(line: _Line, start: int, allowed) -> Dict[str, Tuple[int, str]]:
    found = {}
    for i in range(start, len(line.tokens)):
        token = line.tokens[i][1]
        key, eq, value = token.partition("=")
        if not eq or key not in allowed:
            raise line.error(f"unexpected field {token!r}", i)
        if key in found:
            raise line.error(f"field {key!r} given twice", i, SemanticError)
        found[key] = (i, value)
    return found


def _require(line: _Line, fields, keys):
    for key in keys:
        if key not in fields:
            raise line.error(f"header lacks {key}=", 0)


# ---------------------------------------------------------------------------
# native format


def _emit_list(items) -> str:
    items = list(items)
    return ",".join(items) if items else "-"


def _emit_names(names) -> str:
    return _emit_list(format_name(x) for x in sorted(names, key=name_sort_key))


def _emit_letters(alphabet: Alphabet) -> List[str]:
    return [f"letters {' '.join(alphabet.names)}"] if alphabet.names else []


def emit_native(a) -> str:
    if isinstance(a, StreettNSA):
        return _emit_native_nsa(a)
    return _emit_native_det(a)


def _emit_native_nsa(a: StreettNSA) -> str:
    name = a.alphabet.name
    lines = [f"nsa n={a.n} k={a.k} sigma={a.alphabet.size} basis={a.basis}"]
    lines += _emit_letters(a.alphabet)
    lines.append(f"init {_emit_list(str(q) for q in sorted(a.initial))}")
    for p, letter, q in sorted(a.transitions):
        lines.append(f"t {p} {name(letter)} {q}")

    def members(group):
        if a.basis == STATE:
            return _emit_list(str(q) for q in sorted(group))
        return _emit_list(f"{p}:{name(x)}:{q}" for p, x, q in sorted(group))

    for i, (good, bad) in enumerate(a.pairs, 1):
        lines.append(f"pair {i} G={members(good)} B={members(bad)}")
    return "\n".join(lines) + "\n"


def _emit_native_det(a: DetTransitionAutomaton) -> str:
    n, k, mu = a.meta
    head = f"{a.kind} n={n} k={k} mu={mu} sigma={a.alphabet.size} states={a.num_states}"
    variant = a.stats.get("variant")
    if variant:
        head += f" variant={variant}"
    lines = [head]
    lines += _emit_letters(a.alphabet)
    lines.append(f"init {a.initial}")
    if a.sink is not None:
        lines.append(f"sink {a.sink}")
    for s, enc in enumerate(a.states):
        line = f"state {s} {enc.decode('ascii')}"
        if a.kind == DRA:
            f_names, e_names = a.state_labels[s]
            line += f" F={_emit_names(f_names)} E={_emit_names(e_names)}"
        lines.append(line)
    for s, row in enumerate(a.delta):
        for letter, d in enumerate(row):
            line = f"t {s} {a.alphabet.name(letter)} {d}"
            label = a.labels[s][letter]
            if a.kind == DRTA:
                line += f" acc={_emit_names(label[0])} rej={_emit_names(label[1])}"
            elif a.kind == DPTA:
                line += f" p={label}"
            lines.append(line)
    return "\n".join(lines) + "\n"


def _parse_list(line: _Line, index: int, value: str) -> List[str]:
    if value == "-":
        return []
    items = value.split(",")
    if any(not item for item in items):
        raise line.error(f"malformed list {value!r}", index)
    return items


def _parse_names(line: _Line, index: int, value: str) -> frozenset:
    out = []
    for item in _parse_list(line, index, value):
        try:
            out.append(parse_name(item))
        except ValueError:
            raise line.error(f"malformed node name {item!r}", index) from None
    return frozenset(out)


def _letter(line: _Line, index: int, alphabet: Alphabet, token: Optional[str] = None) -> int:
    token = line.tokens[index][1] if token is None else token
    try:
        return alphabet.index(token)
    except DomainError as exc:
        raise line.error(str(exc), index, SemanticError) from None


def _state(line: _Line, index: int, n: int, text: Optional[str] = None) -> int:
    q = _int(line, index, text)
    if not 0 <= q < n:
        raise line.error(f"state {q} outside 0..{n - 1}", index, SemanticError)
    return q


def parse_native(text: str):
    lines = _native_lines(text)
    if not lines:
        raise ParseError("empty input", 1, 1)
    kind = lines[0].head
    if kind == "nsa":
        return _parse_native_nsa(lines)
    if kind in (DRTA, DPTA, DRA):
        return _parse_native_det(lines)
    raise lines[0].error(f"unknown automaton kind {kind!r}")


def _letters_line(line: _Line, sigma: int, seen: Optional[Alphabet]) -> Alphabet:
    if seen is not None and seen.names:
        raise line.error("duplicate letters line", 0, SemanticError)
    names = tuple(tok for _, tok in line.tokens[1:])
    if len(names) != sigma:
        raise line.error(f"{len(names)} letter names for sigma={sigma}", 0, SemanticError)
    try:
        return Alphabet(sigma, names)
    except DomainError as exc:
        raise line.error(str(exc), 0, SemanticError) from None


def _header(line: _Line, allowed, required):
    fields = _keyvals(line, 1, allowed)
    _require(line, fields, required)
    return fields


def _parse_native_nsa(lines: List[_Line]) -> StreettNSA:
    head = lines[0]
    fields = _header(head, {"n", "k", "sigma", "basis"}, ("n", "k", "sigma"))
    n = _int(head, fields["n"][0], fields["n"][1])
    k = _int(head, fields["k"][0], fields["k"][1])
    sigma = _int(head, fields["sigma"][0], fields["sigma"][1])
    basis = fields.get("basis", (0, STATE))[1]
    if basis not in (STATE, TRANSITION):
        raise head.error(f"unknown basis {basis!r}", fields["basis"][0])
    if n < 1 or k < 0 or sigma < 1:
        raise head.error("header values out of range", 0, SemanticError)
    alphabet = Alphabet(sigma)
    initial: Optional[List[int]] = None
    transitions = set()
    raw_pairs: Dict[int, Tuple[_Line, str, str]] = {}
    for line in lines[1:]:
        h = line.head
        if h == "nsa":
            raise line.error("duplicate header", 0, SemanticError)
        if h == "letters":
            alphabet = _letters_line(line, sigma, alphabet)
        elif h == "init":
            if initial is not None:
                raise line.error("duplicate init line", 0, SemanticError)
            items = [item for _, tok in line.tokens[1:] for item in _parse_list(line, 1, tok)]
            initial = [_state(line, 1, n, item) for item in items]
        elif h == "t":
            if len(line.tokens) != 4:
                raise line.error("transition needs: t <src> <letter> <dst>", 0)
            p = _state(line, 1, n)
            a = _letter(line, 2, alphabet)
            q = _state(line, 3, n)
            transitions.add((p, a, q))
        elif h == "pair":
            if len(line.tokens) != 4:
                raise line.error("pair needs: pair <i> G=<list> B=<list>", 0)
            i = _int(line, 1)
            g_tok, b_tok = line.tokens[2][1], line.tokens[3][1]
            if not g_tok.startswith("G=") or not b_tok.startswith("B="):
                raise line.error("pair fields must be G=... B=...", 2)
            if not 1 <= i <= k:
                raise line.error(f"pair index {i} outside 1..{k}", 1, SemanticError)
            if i in raw_pairs:
                raise line.error(f"pair {i} given twice", 1, SemanticError)
            raw_pairs[i] = (line, g_tok[2:], b_tok[2:])
        else:
            raise line.error(f"unknown line kind {h!r}")
    if initial is None:
        raise head.error("missing init line", 0, SemanticError)
    if len(raw_pairs) != k:
        missing = sorted(set(range(1, k + 1)) - set(raw_pairs))
        raise head.error(f"header declares k={k} but pairs {missing} are missing", 0, SemanticError)

    def members(line, index, value):
        out = []
        for item in _parse_list(line, index, value):
            if basis == STATE:
                out.append(_state(line, index, n, item))
                continue
            parts = item.split(":")
            if len(parts) != 3:
                raise line.error(f"edge {item!r} is not src:letter:dst", index)
            edge = (_state(line, index, n, parts[0]), _letter(line, index, alphabet, parts[1]),
                    _state(line, index, n, parts[2]))
            if edge not in transitions:
                raise line.error(f"edge {item!r} is not a transition", index, SemanticError)
            out.append(edge)
        return frozenset(out)

    pairs = tuple(
        (members(line, 2, g), members(line, 3, b))
        for line, g, b in (raw_pairs[i] for i in range(1, k + 1))
    )
    try:
        return StreettNSA(n, alphabet, frozenset(initial), frozenset(transitions), pairs, basis)
    except StreettDetError as exc:
        raise head.error(str(exc), 0, SemanticError) from None


def _parse_native_det(lines: List[_Line]) -> DetTransitionAutomaton:
    head = lines[0]
    kind = head.head
    fields = _header(head, {"n", "k", "mu", "sigma", "states", "variant"},
                     ("n", "k", "mu", "sigma", "states"))
    n, k, mu, sigma, m = (_int(head, fields[x][0], fields[x][1]) for x in ("n", "k", "mu", "sigma", "states"))
    if min(n, sigma, m) < 1 or k < 0 or mu < 0:
        raise head.error("header values out of range", 0, SemanticError)
    alphabet = Alphabet(sigma)
    initial = sink = None
    encodings: Dict[int, bytes] = {}
    state_labels: Dict[int, Tuple[frozenset, frozenset]] = {}
    delta: Dict[Tuple[int, int], Tuple[int, object]] = {}
    for line in lines[1:]:
        h = line.head
        if h in (DRTA, DPTA, DRA):
            raise line.error("duplicate header", 0, SemanticError)
        if h == "letters":
            alphabet = _letters_line(line, sigma, alphabet)
        elif h in ("init", "sink"):
            if len(line.tokens) != 2:
                raise line.error(f"{h} needs one state", 0)
            if (initial if h == "init" else sink) is not None:
                raise line.error(f"duplicate {h} line", 0, SemanticError)
            value = _state(line, 1, m)
            if h == "init":
                initial = value
            else:
                sink = value
        elif h == "state":
            if len(line.tokens) < 3:
                raise line.error("state needs: state <id> <encoding>", 0)
            s = _state(line, 1, m)
            if s in encodings:
                raise line.error(f"state {s} given twice", 1, SemanticError)
            encodings[s] = line.tokens[2][1].encode("ascii", "replace")
            extra = _keyvals(line, 3, {"F", "E"} if kind == DRA else set())
            if kind == DRA:
                if set(extra) != {"F", "E"}:
                    raise line.error("dra states need F= and E=", 0)
                state_labels[s] = (_parse_names(line, extra["F"][0], extra["F"][1]),
                                   _parse_names(line, extra["E"][0], extra["E"][1]))
        elif h == "t":
            if len(line.tokens) < 4:
                raise line.error("transition needs: t <src> <letter> <dst> ...", 0)
            s = _state(line, 1, m)
            a = _letter(line, 2, alphabet)
            d = _state(line, 3, m)
            if (s, a) in delta:
                raise line.error(f"second transition from {s} on {line.tokens[2][1]}", 0, SemanticError)
            if kind == DRTA:
                extra = _keyvals(line, 4, {"acc", "rej"})
                _require(line, extra, ("acc", "rej"))
                label = (_parse_names(line, extra["acc"][0], extra["acc"][1]),
                         _parse_names(line, extra["rej"][0], extra["rej"][1]))
            elif kind == DPTA:
                extra = _keyvals(line, 4, {"p"})
                _require(line, extra, ("p",))
                label = _int(line, extra["p"][0], extra["p"][1])
            else:
                _keyvals(line, 4, set())
                label = None
            delta[(s, a)] = (d, label)
        else:
            raise line.error(f"unknown line kind {h!r}")
    if initial is None:
        raise head.error("missing init line", 0, SemanticError)
    missing = [s for s in range(m) if s not in encodings]
    if missing:
        raise head.error(f"states {missing} are not declared", 0, SemanticError)
    holes = [(s, a) for s in range(m) for a in range(sigma) if (s, a) not in delta]
    if holes:
        raise head.error(f"transition table is not total, e.g. at {holes[0]}", 0, SemanticError)
    try:
        return DetTransitionAutomaton(
            kind=kind,
            alphabet=alphabet,
            states=tuple(encodings[s] for s in range(m)),
            initial=initial,
            delta=tuple(tuple(delta[(s, a)][0] for a in range(sigma)) for s in range(m)),
            labels=tuple(tuple(delta[(s, a)][1] for a in range(sigma)) for s in range(m)),
            meta=(n, k, mu),
            sink=sink,
            state_labels=tuple(state_labels[s] for s in range(m)) if kind == DRA else None,
            stats={"variant": fields["variant"][1]} if "variant" in fields else {},
        )
    except StreettDetError as exc:
        raise head.error(str(exc), 0, SemanticError) from None


# ---------------------------------------------------------------------------
# HOA v1 subset


def _ap_count(alphabet: Alphabet) -> int:
    m = alphabet.size.bit_length() - 1
    if 1 << m != alphabet.size:
        raise DomainError(f"HOA output needs an alphabet of size 2^m, got {alphabet.size}")
    return m


def _minterm(letter: int, m: int) -> str:
    if m == 0:
        return "t"
    return "&".join(str(i) if letter >> i & 1 else f"!{i}" for i in range(m))


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _marks(marks) -> str:
    marks = sorted(marks)
    return " {" + " ".join(map(str, marks)) + "}" if marks else ""


def streett_formula(k: int) -> str:
    if k == 0:
        return "0 t"
    return f"{2 * k} " + "&".join(f"(Fin({2 * i})|Inf({2 * i + 1}))" for i in range(k))


def rabin_formula(k: int) -> str:
    if k == 0:
        return "0 f"
    return f"{2 * k} " + "|".join(f"(Fin({2 * i})&Inf({2 * i + 1}))" for i in range(k))


def parity_min_even_formula(colors: int) -> str:
    def rec(c):
        if c == colors - 1:
            return f"Inf({c})" if c % 2 == 0 else f"Fin({c})"
        inner = rec(c + 1)
        return f"Inf({c})|({inner})" if c % 2 == 0 else f"Fin({c})&({inner})"

    return f"{colors} " + (rec(0) if colors else "f")


def _hoa_common(alphabet: Alphabet, n_states: int, starts) -> List[str]:
    m = _ap_count(alphabet)
    lines = ["HOA: v1", f"States: {n_states}"]
    lines += [f"Start: {s}" for s in starts]
    lines.append("AP: " + " ".join([str(m)] + [_quote(f"p{i}") for i in range(m)]))
    if alphabet.names:
        lines.append("letter-names: " + " ".join(_quote(x) for x in alphabet.names))
    return lines


def emit_hoa(a) -> str:
    if isinstance(a, StreettNSA):
        return _emit_hoa_nsa(a)
    return _emit_hoa_det(a)


def _emit_hoa_nsa(a: StreettNSA) -> str:
    m = _ap_count(a.alphabet)
    lines = _hoa_common(a.alphabet, a.n, sorted(a.initial))
    lines.append(f"acc-name: Streett {a.k}")
    lines.append(f"Acceptance: {streett_formula(a.k)}")
    lines.append("properties: explicit-labels " + ("state-acc" if a.basis == STATE else "trans-acc"))
    lines.append("--BODY--")

    def marks_of(member):
        out = []
        for i, (good, bad) in enumerate(a.pairs):
            if member in bad:
                out.append(2 * i)
            if member in good:
                out.append(2 * i + 1)
        return out

    for q in range(a.n):
        lines.append(f"State: {q}" + (_marks(marks_of(q)) if a.basis == STATE else ""))
        for letter in range(a.alphabet.size):
            for d in a.post[q][letter]:
                extra = _marks(marks_of((q, letter, d))) if a.basis == TRANSITION else ""
                lines.append(f"[{_minterm(letter, m)}] {d}{extra}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"


def _emit_hoa_det(a: DetTransitionAutomaton) -> str:
    m = _ap_count(a.alphabet)
    n, k, mu = a.meta
    lines = _hoa_common(a.alphabet, a.num_states, [a.initial])
    lines.append(f"det-kind: {a.kind}")
    lines.append(f"streett-meta: {n} {k} {mu}")
    if a.stats.get("variant"):
        lines.append(f"construction-variant: {a.stats['variant']}")
    if a.sink is not None:
        lines.append(f"sink-state: {a.sink}")
    if a.kind == DPTA:
        colors = a.top_priority + 1
        lines.append(f"acc-name: parity min even {colors}")
        lines.append(f"Acceptance: {parity_min_even_formula(colors)}")
        index = {}
    else:
        names = list(a.rabin_pairs)
        index = {name: i for i, name in enumerate(names)}
        lines.append(f"acc-name: Rabin {len(names)}")
        lines.append(f"Acceptance: {rabin_formula(len(names))}")
        lines.append("rabin-names: " + " ".join(_quote(format_name(x)) for x in names))
    lines.append("properties: deterministic complete explicit-labels "
                 + ("state-acc" if a.kind == DRA else "trans-acc"))
    lines.append("--BODY--")
    for s, enc in enumerate(a.states):
        head = f"State: {s} {_quote(enc.decode('ascii'))}"
        if a.kind == DRA:
            f_names, e_names = a.state_labels[s]
            head += _marks([2 * index[x] for x in e_names] + [2 * index[x] + 1 for x in f_names])
        lines.append(head)
        for letter, d in enumerate(a.delta[s]):
            label = a.labels[s][letter]
            if a.kind == DRTA:
                extra = _marks([2 * index[x] for x in label[1]] + [2 * index[x] + 1 for x in label[0]])
            elif a.kind == DPTA:
                extra = _marks([label])
            else:
                extra = ""
            lines.append(f"[{_minterm(letter, m)}] {d}{extra}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"


_HOA_TOKEN = re.compile(r'"(?:[^"\\]|\\.)*"|\[[^\]]*\]|\{[^}]*\}|[^\s"\[{]+')
_SUPPORTED_HEADERS = {
    "HOA", "States", "Start", "AP", "Acceptance", "acc-name", "name", "tool", "properties",
    "letter-names", "det-kind", "streett-meta", "sink-state", "rabin-names", "construction-variant",
}


_HOA_COMMENT = re.compile(r'"(?:[^"\\]|\\.)*"|/\*.*?\*/', re.S)


def _strip_hoa_comments(text: str) -> str:
    """Blank out ``/* ... */`` comments, keeping line and column positions."""
    def blank(m):
        body = m.group()
        return body if body.startswith('"') else re.sub(r"[^\n]", " ", body)

    return _HOA_COMMENT.sub(blank, text)


def _hoa_lines(text: str) -> List[_Line]:
    text = _strip_hoa_comments(text)
    out = []
    for number, raw in enumerate(text.splitlines(), 1):
        tokens = [(m.start() + 1, m.group()) for m in _HOA_TOKEN.finditer(raw)]
        if tokens:
            out.append(_Line(number, tokens))
    return out


def _unquote(line: _Line, index: int) -> str:
    token = line.tokens[index][1]
    if len(token) < 2 or token[0] != '"' or token[-1] != '"':
        raise line.error(f"expected a quoted string, found {token!r}", index)
    return re.sub(r"\\(.)", r"\1", token[1:-1])


def _parse_label(line: _Line, token: str, m: int) -> int:
    body = token[1:-1].replace(" ", "")
    if m == 0:
        if body != "t":
            raise line.error(f"label {token} is not a minterm", 0, UnsupportedFeatureError)
        return 0
    letter = 0
    seen = set()
    for lit in body.split("&"):
        match = re.fullmatch(r"(!?)(\d+)", lit)
        if not match:
            raise line.error(f"label {token} is not a minterm", 0, UnsupportedFeatureError)
        ap = int(match.group(2))
        if ap >= m or ap in seen:
            raise line.error(f"label {token} is not a minterm", 0, UnsupportedFeatureError)
        seen.add(ap)
        if not match.group(1):
            letter |= 1 << ap
    if len(seen) != m:
        raise line.error(f"label {token} is not a full minterm", 0, UnsupportedFeatureError)
    return letter


def _parse_marks(line: _Line, token: str, index: int) -> List[int]:
    body = token[1:-1].split()
    try:
        return [int(x) for x in body]
    except ValueError:
        raise line.error(f"malformed acceptance marks {token}", index) from None


def parse_hoa(text: str):
    lines = _hoa_lines(text)
    if not lines or lines[0].tokens[0][1] != "HOA:":
        raise ParseError("input does not start with 'HOA: v1'", 1, 1)
    headers: Dict[str, _Line] = {}
    starts: List[int] = []
    body_at = None
    for idx, line in enumerate(lines):
        key = line.head
        if key == "--BODY--":
            body_at = idx
            break
        if not key.endswith(":"):
            raise line.error(f"expected a header name, found {key!r}")
        name = key[:-1]
        if name not in _SUPPORTED_HEADERS:
            raise line.error(f"header {name!r} is not supported", 0, UnsupportedFeatureError)
        if name == "Start":
            if len(line.tokens) != 2 or not line.tokens[1][1].isdigit():
                raise line.error("Start takes one state (conjunctions unsupported)", 1, UnsupportedFeatureError)
            starts.append(int(line.tokens[1][1]))
            continue
        if name in headers:
            raise line.error(f"duplicate header {name!r}", 0, SemanticError)
        headers[name] = line
    if body_at is None:
        raise lines[-1].error("missing --BODY--")
    if len(headers["HOA"].tokens) != 2 or headers["HOA"].tokens[1][1] != "v1":
        raise headers["HOA"].error("only HOA v1 is supported", 1, UnsupportedFeatureError)
    for required in ("States", "AP", "Acceptance", "acc-name"):
        if required not in headers:
            raise lines[0].error(f"missing header {required}:", 0, SemanticError)
    n_states = _int(headers["States"], 1)
    ap = headers["AP"]
    m = _int(ap, 1)
    if len(ap.tokens) != m + 2:
        raise ap.error(f"AP declares {m} propositions but lists {len(ap.tokens) - 2}", 0, SemanticError)
    sigma = 1 << m
    names = None
    if "letter-names" in headers:
        line = headers["letter-names"]
        names = tuple(_unquote(line, i) for i in range(1, len(line.tokens)))
    try:
        alphabet = Alphabet(sigma, names)
    except DomainError as exc:
        raise headers["letter-names"].error(str(exc), 0, SemanticError) from None
    for s in starts:
        if not 0 <= s < n_states:
            raise lines[0].error(f"start state {s} outside 0..{n_states - 1}", 0, SemanticError)
    acc_line = headers["acc-name"]
    acc_words = [tok for _, tok in acc_line.tokens[1:]]
    acceptance = "".join(tok for _, tok in headers["Acceptance"].tokens[1:])

    # body
    states: Dict[int, Tuple[Optional[str], List[int]]] = {}
    edges: List[Tuple[_Line, int, int, int, List[int]]] = []
    current = None
    end_seen = False
    for line in lines[body_at + 1:]:
        key = line.head
        if key == "--END--":
            end_seen = True
            break
        if key == "State:":
            if len(line.tokens) < 2:
                raise line.error("State: needs an id")
            current = _state(line, 1, n_states)
            if current in states:
                raise line.error(f"state {current} defined twice", 1, SemanticError)
            label_name, marks = None, []
            for i in range(2, len(line.tokens)):
                tok = line.tokens[i][1]
                if tok.startswith('"'):
                    label_name = _unquote(line, i)
                elif tok.startswith("{"):
                    marks = _parse_marks(line, tok, i)
                elif tok.startswith("["):
                    raise line.error("state labels are not supported", i, UnsupportedFeatureError)
                else:
                    raise line.error(f"unexpected token {tok!r}", i)
            states[current] = (label_name, marks)
            continue
        if current is None:
            raise line.error("edge before any State:")
        if not key.startswith("["):
            raise line.error("implicit edge labels are not supported", 0, UnsupportedFeatureError)
        letter = _parse_label(line, key, m)
        if len(line.tokens) < 2:
            raise line.error("edge lacks a target")
        target = line.tokens[1][1]
        if "&" in target:
            raise line.error("universal branching is not supported", 1, UnsupportedFeatureError)
        d = _state(line, 1, n_states)
        marks = []
        if len(line.tokens) > 2:
            if len(line.tokens) > 3 or not line.tokens[2][1].startswith("{"):
                raise line.error("unexpected tokens after edge target", 2)
            marks = _parse_marks(line, line.tokens[2][1], 2)
        edges.append((line, current, letter, d, marks))
    if not end_seen:
        raise lines[-1].error("missing --END--")

    if acc_words[:1] == ["Streett"]:
        return _hoa_to_nsa(headers, acc_words, acceptance, n_states, alphabet, starts, states, edges)
    if acc_words[:1] == ["Rabin"] or acc_words[:3] == ["parity", "min", "even"]:
        return _hoa_to_det(headers, acc_words, acceptance, n_states, alphabet, starts, states, edges)
    raise acc_line.error(f"acceptance {' '.join(acc_words)!r} is not supported", 1, UnsupportedFeatureError)


def _pair_count(headers, acc_words) -> int:
    line = headers["acc-name"]
    if len(acc_words) != 2 or not acc_words[1].isdigit():
        raise line.error("acc-name needs a pair count", 1)
    return int(acc_words[1])


def _check_formula(headers, acceptance: str, expected: str):
    if acceptance.replace(" ", "") != expected.replace(" ", ""):
        raise headers["Acceptance"].error(
            f"Acceptance formula differs from the canonical {expected!r}", 1, UnsupportedFeatureError
        )


def _hoa_to_nsa(headers, acc_words, acceptance, n_states, alphabet, starts, states, edges):
    k = _pair_count(headers, acc_words)
    _check_formula(headers, acceptance, streett_formula(k))
    if not starts:
        raise headers["HOA"].error("no Start: state", 0, SemanticError)
    state_marked = any(marks for _, marks in states.values())
    edge_marked = any(marks for *_, marks in edges)
    if state_marked and edge_marked:
        raise headers["HOA"].error("mixed state and transition marks", 0, UnsupportedFeatureError)
    props = {tok for _, tok in headers["properties"].tokens[1:]} if "properties" in headers else set()
    basis = TRANSITION if edge_marked or "trans-acc" in props else STATE
    good = [set() for _ in range(k)]
    bad = [set() for _ in range(k)]

    def place(member, marks, line):
        for mark in marks:
            if not 0 <= mark < 2 * k:
                raise line.error(f"acceptance set {mark} outside 0..{2 * k - 1}", 0, SemanticError)
            (bad if mark % 2 == 0 else good)[mark // 2].add(member)

    for q, (_, marks) in states.items():
        place(q, marks, headers["HOA"])
    transitions = set()
    for line, q, letter, d, marks in edges:
        transitions.add((q, letter, d))
        place((q, letter, d), marks, line)
    try:
        return StreettNSA(n_states, alphabet, frozenset(starts), frozenset(transitions),
                          tuple((frozenset(g), frozenset(b)) for g, b in zip(good, bad)), basis)
    except StreettDetError as exc:
        raise headers["HOA"].error(str(exc), 0, SemanticError) from None


def _hoa_to_det(headers, acc_words, acceptance, n_states, alphabet, starts, states, edges):
    parity = acc_words[0] == "parity"
    kind = None
    if "det-kind" in headers:
        kind = headers["det-kind"].tokens[1][1]
    if parity:
        if len(acc_words) != 4 or not acc_words[3].isdigit():
            raise headers["acc-name"].error("acc-name: parity min even needs a color count", 1)
        colors = int(acc_words[3])
        _check_formula(headers, acceptance, parity_min_even_formula(colors))
        kind = kind or DPTA
    else:
        count = _pair_count(headers, acc_words)
        _check_formula(headers, acceptance, rabin_formula(count))
        if kind is None:
            kind = DRA if any(marks for _, marks in states.values()) else DRTA
    if (kind == DPTA) != parity or kind not in (DRTA, DPTA, DRA):
        raise headers["acc-name"].error(f"det-kind {kind!r} does not fit the acceptance", 1, SemanticError)
    if len(starts) != 1:
        raise headers["HOA"].error("deterministic automata need exactly one Start:", 0, SemanticError)
    if "streett-meta" in headers:
        meta_line = headers["streett-meta"]
        meta = tuple(_int(meta_line, i) for i in (1, 2, 3))
    else:
        meta = (0, 0, 0)
    if "rabin-names" in headers:
        line = headers["rabin-names"]
        try:
            pair_names = [parse_name(_unquote(line, i)) for i in range(1, len(line.tokens))]
        except ValueError:
            raise line.error("malformed node name in rabin-names", 1) from None
    elif not parity:
        pair_names = [((i + 1, 1),) for i in range(count)]
    else:
        pair_names = []
    if not parity and len(pair_names) != count:
        raise headers["rabin-names"].error("rabin-names and the pair count disagree", 0, SemanticError)

    def names_of(marks, line):
        acc, rej = set(), set()
        for mark in marks:
            if not 0 <= mark < 2 * len(pair_names):
                raise line.error(f"acceptance set {mark} out of range", 0, SemanticError)
            (rej if mark % 2 == 0 else acc).add(pair_names[mark // 2])
        return frozenset(acc), frozenset(rej)

    table: Dict[Tuple[int, int], Tuple[int, object]] = {}
    for line, q, letter, d, marks in edges:
        if (q, letter) in table:
            raise line.error("second edge for the same state and letter", 0, SemanticError)
        if kind == DPTA:
            if len(marks) != 1:
                raise line.error("every parity edge needs exactly one color", 0, SemanticError)
            label = marks[0]
        elif kind == DRTA:
            label = names_of(marks, line)
        else:
            if marks:
                raise line.error("dra edges carry no marks", 0, SemanticError)
            label = None
        table[(q, letter)] = (d, label)
    sigma = alphabet.size
    holes = [(q, a) for q in range(n_states) for a in range(sigma) if (q, a) not in table]
    if holes:
        raise headers["HOA"].error(f"transition table is not total, e.g. at {holes[0]}", 0, SemanticError)
    encodings = tuple(
        (states.get(q, (None, []))[0] or str(q)).encode("ascii", "replace") for q in range(n_states)
    )
    state_labels = None
    if kind == DRA:
        state_labels = tuple(
            names_of(states.get(q, (None, []))[1], headers["HOA"]) for q in range(n_states)
        )
    sink = None
    if "sink-state" in headers:
        sink = _int(headers["sink-state"], 1)
    stats = {}
    if "construction-variant" in headers:
        stats["variant"] = headers["construction-variant"].tokens[1][1]
    try:
        return DetTransitionAutomaton(
            kind=kind,
            alphabet=alphabet,
            states=encodings,
            initial=starts[0],
            delta=tuple(tuple(table[(q, a)][0] for a in range(sigma)) for q in range(n_states)),
            labels=tuple(tuple(table[(q, a)][1] for a in range(sigma)) for q in range(n_states)),
            meta=meta,
            sink=sink,
            state_labels=state_labels,
            stats=stats,
        )
    except StreettDetError as exc:
        raise headers["HOA"].error(str(exc), 0, SemanticError) from None


# ---------------------------------------------------------------------------
# dispatch


def detect_format(text: str) -> str:
    for raw in _strip_hoa_comments(text).splitlines():
        body = raw.split("#", 1)[0].strip()
        if body:
            return HOA if body.startswith("HOA:") else NATIVE
    return NATIVE


def parse_automaton(text: str):
    """Parse either format; the first meaningful line decides which."""
    if detect_format(text) == HOA:
        return parse_hoa(text)
    return parse_native(text)


def emit_automaton(a, fmt: str = NATIVE) -> str:
    """Canonical text for ``a``; byte-identical for equal inputs."""
    if fmt == NATIVE:
        return emit_native(a)
    if fmt == HOA:
        return emit_hoa(a)
    raise DomainError(f"unknown format {fmt!r}")
