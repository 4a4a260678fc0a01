"""Line-oriented text formats ``cpa v1`` and ``sca v1``.

Example::

    cpa v1
    in: 0 1
    out: 0 1
    states: 2
    initial: 0
    color: 0 2
    color: 1 1
    trans: 0 0 0 1 i
    ...

``#`` starts a comment, so the letter ``#`` is written as the token ``SHARP``.
Streett files replace ``color`` lines by ``pair: <j> Q: <ids...> P: <ids...>``
and use one cost flag per pair, e.g. ``trans: 0 a b 1 ie``.
"""

from __future__ import annotations

from .automaton import CostParityAutomaton, TrivialVerdict
from .streett import StreettCostAutomaton

SHARP_TOKEN = "SHARP"


class ParseError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def _escape(letter) -> str:
    s = str(letter)
    if s == "#":
        return SHARP_TOKEN
    if not s or s == SHARP_TOKEN or "#" in s or any(ch.isspace() for ch in s):
        raise ValueError(f"letter {letter!r} cannot be serialized")
    return s


def _unescape(token: str) -> str:
    return "#" if token == SHARP_TOKEN else token


def serialize_automaton(A) -> str:
    lines = []
    streett = isinstance(A, StreettCostAutomaton)
    lines.append("sca v1" if streett else "cpa v1")
    if A.name:
        lines.append(f"# {A.name}")
    lines.append("in: " + " ".join(_escape(a) for a in A.in_alphabet))
    lines.append("out: " + " ".join(_escape(b) for b in A.out_alphabet))
    lines.append(f"states: {A.n_states}")
    lines.append(f"initial: {A.initial}")
    if streett:
        for j, (Qj, Pj) in enumerate(A.pairs):
            lines.append(f"pair: {j} Q: {' '.join(map(str, sorted(Qj)))} P: {' '.join(map(str, sorted(Pj)))}")
    else:
        for q, c in enumerate(A.colors):
            lines.append(f"color: {q} {c}")
    for q in range(A.n_states):
        for a in A.in_alphabet:
            for b in A.out_alphabet:
                q2, flag = A.delta[(q, a, b)]
                if streett:
                    flags = "".join("i" if f else "e" for f in flag)
                else:
                    flags = "i" if flag else "e"
                lines.append(f"trans: {q} {_escape(a)} {_escape(b)} {q2} {flags}")
    return "\n".join(lines) + "\n"


def _int(token, line, what):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {token!r}", line) from None


def parse_automaton(text: str):
    """Parse a ``cpa v1`` or ``sca v1`` file.

    Returns a :class:`CostParityAutomaton`, a :class:`StreettCostAutomaton`,
    or a :class:`TrivialVerdict` for a parity automaton whose colors all have
    the same parity.
    """
    entries = []
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            entries.append((no, body))
    if not entries:
        raise ParseError("empty file: missing header", 1)
    no, header = entries[0]
    kind = header.split()
    if kind not in (["cpa", "v1"], ["sca", "v1"]):
        raise ParseError(f"missing header 'cpa v1' or 'sca v1', got {header!r}", no)
    streett = kind[0] == "sca"
    fields = {}
    colors, pairs, delta = {}, {}, {}
    for no, body in entries[1:]:
        key, _, rest = body.partition(":")
        key = key.strip()
        toks = rest.split()
        if key in ("in", "out"):
            if key in fields:
                raise ParseError(f"duplicate '{key}' line", no)
            letters = [_unescape(t) for t in toks]
            if not letters or len(set(letters)) != len(letters):
                raise ParseError(f"'{key}' needs distinct letters", no)
            fields[key] = letters
        elif key in ("states", "initial"):
            if key in fields:
                raise ParseError(f"duplicate '{key}' line", no)
            if len(toks) != 1:
                raise ParseError(f"'{key}' takes one integer", no)
            fields[key] = _int(toks[0], no, key)
        elif key == "color" and not streett:
            if len(toks) != 2:
                raise ParseError("'color' takes a state and a color", no)
            q, c = _int(toks[0], no, "state"), _int(toks[1], no, "color")
            if q in colors:
                raise ParseError(f"duplicate color for state {q}", no)
            if c < 0:
                raise ParseError("colors must be non-negative", no)
            colors[q] = (c, no)
        elif key == "pair" and streett:
            j, Qj, Pj = _parse_pair(rest, no)
            if j in pairs:
                raise ParseError(f"duplicate pair {j}", no)
            pairs[j] = (Qj, Pj, no)
        elif key == "trans":
            if len(toks) != 5:
                raise ParseError("'trans' takes: q a b q' flags", no)
            q = _int(toks[0], no, "state")
            a, b = _unescape(toks[1]), _unescape(toks[2])
            q2 = _int(toks[3], no, "state")
            flags = toks[4]
            if any(ch not in "ei" for ch in flags) or (not streett and len(flags) != 1):
                raise ParseError(f"bad cost flags {flags!r}", no)
            if (q, a, b) in delta:
                raise ParseError(f"duplicate transition for ({q}, {toks[1]}, {toks[2]})", no)
            delta[(q, a, b)] = (q2, flags, no)
        else:
            raise ParseError(f"unknown line {body!r}", no)
    for key in ("in", "out", "states", "initial"):
        if key not in fields:
            raise ParseError(f"missing '{key}' line", entries[-1][0])
    n = fields["states"]
    last = entries[-1][0]
    if n <= 0:
        raise ParseError("need at least one state", last)
    if not 0 <= fields["initial"] < n:
        raise ParseError(f"initial state {fields['initial']} is not a state", last)
    ins, outs = fields["in"], fields["out"]
    for (q, a, b), (q2, flags, no) in delta.items():
        if not 0 <= q < n or not 0 <= q2 < n:
            raise ParseError(f"unknown state in transition ({q}, {a}, {b})", no)
        if a not in ins:
            raise ParseError(f"unknown input letter {a!r}", no)
        if b not in outs:
            raise ParseError(f"unknown output letter {b!r}", no)
    for q in range(n):
        for a in ins:
            for b in outs:
                if (q, a, b) not in delta:
                    raise ParseError(f"incomplete transition function: missing ({q}, {_escape(a)}, {_escape(b)})", last)
    if streett:
        J = sorted(pairs)
        if J != list(range(len(J))):
            raise ParseError("pairs must be numbered 0..|J|-1", last)
        for j in J:
            Qj, Pj, no = pairs[j]
            if any(not 0 <= q < n for q in Qj | Pj):
                raise ParseError(f"pair {j} mentions an unknown state", no)
        for (q, a, b), (q2, flags, no) in delta.items():
            if len(flags) != len(J):
                raise ParseError(f"expected {len(J)} cost flags, got {flags!r}", no)
        table = {k: (q2, tuple(f == "i" for f in flags)) for k, (q2, flags, _) in delta.items()}
        return StreettCostAutomaton(ins, outs, n, fields["initial"], [pairs[j][:2] for j in J], table)
    for (q, (c, no)) in colors.items():
        if not 0 <= q < n:
            raise ParseError(f"color for unknown state {q}", no)
    missing = [q for q in range(n) if q not in colors]
    if missing:
        raise ParseError(f"missing color for state {missing[0]}", last)
    table = {k: (q2, flags == "i") for k, (q2, flags, _) in delta.items()}
    A = CostParityAutomaton(ins, outs, [colors[q][0] for q in range(n)], fields["initial"], table)
    verdict = A.trivial_verdict()
    return verdict if verdict is not None else A


def _parse_pair(rest, no):
    toks = rest.split()
    try:
        iq = toks.index("Q:")
        ip = toks.index("P:")
    except ValueError:
        raise ParseError("'pair' needs 'Q:' and 'P:' parts", no) from None
    if iq != 1 or ip < iq:
        raise ParseError("expected 'pair: <j> Q: <ids...> P: <ids...>'", no)
    j = _int(toks[0], no, "pair index")
    Qj = frozenset(_int(t, no, "state") for t in toks[iq + 1:ip])
    Pj = frozenset(_int(t, no, "state") for t in toks[ip + 1:])
    return j, Qj, Pj


def load_automaton(path):
    with open(path, encoding="utf-8") as fh:
        return parse_automaton(fh.read())


def save_automaton(A, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_automaton(A))


def parse_word(text: str) -> tuple:
    """Letter pairs written as ``a/b`` separated by commas or spaces."""
    pairs = []
    for tok in text.replace(",", " ").split():
        a, sep, b = tok.partition("/")
        if not sep or not a or not b:
            raise ParseError(f"letter pair {tok!r} must look like 'a/b'")
        pairs.append((_unescape(a), _unescape(b)))
    return tuple(pairs)
