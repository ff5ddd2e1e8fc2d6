"""Read and write the local-score file format and solver reports.

The score format is the plain whitespace grammar used by pedigree/BN
solvers: a variable count, then per variable a header line ``name r`` and
``r`` rows ``score k parent_1 .. parent_k``.  ``#`` starts a comment that
runs to the end of its line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .model import BnslInstance, Family


class ScoreFormatError(ValueError):
    """Raised when a score file violates the grammar or its invariants."""


@dataclass(frozen=True)
class ScoreFile:
    """Raw, order-preserving form of a score file.

    ``blocks`` holds one ``(name, rows)`` pair per variable in declaration
    order, with each row a ``(score, parent_names)`` pair.
    """

    blocks: tuple[tuple[str, tuple[tuple[float, tuple[str, ...]], ...]], ...]

    @property
    def p(self) -> int:
        return len(self.blocks)

    def to_instance(self, palim: int | None = None) -> tuple[BnslInstance, int]:
        """Resolve names to indices and build an instance.

        Args:
            palim: optional parent-set size cap; wider rows are dropped.

        Returns:
            The instance and the number of dropped rows.
        """
        names = tuple(name for name, _ in self.blocks)
        index = {name: i for i, name in enumerate(names)}
        if len(index) != len(names):
            raise ScoreFormatError("duplicate variable name")
        permitted: list[list[tuple[int, ...]]] = [[] for _ in names]
        scores: dict[Family, float] = {}
        dropped = 0
        for i, (name, rows) in enumerate(self.blocks):
            for score, parent_names in rows:
                ps = []
                for pn in parent_names:
                    if pn not in index:
                        raise ScoreFormatError("unknown parent name %r" % pn)
                    ps.append(index[pn])
                if i in ps:
                    raise ScoreFormatError("%s listed as its own parent" % name)
                if palim is not None and len(ps) > palim:
                    dropped += 1
                    continue
                fam = Family(i, tuple(sorted(ps)))
                if len(set(ps)) != len(ps):
                    raise ScoreFormatError("duplicate parent in a row for %s" % name)
                if fam in scores:
                    raise ScoreFormatError("duplicate family %s <- %r" % (name, parent_names))
                scores[fam] = score
                permitted[i].append(fam.parents)
        for i, sets in enumerate(permitted):
            if () not in sets:
                raise ScoreFormatError("missing empty parent set for %s" % names[i])
        return BnslInstance(names,
                            tuple(tuple(sorted(s)) for s in permitted),
                            scores,
                            palim), dropped


def _tokens(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        for tok in body.split():
            yield lineno, tok


def parse_score_file(text: str) -> ScoreFile:
    """Tokenise a score file into a :class:`ScoreFile` without resolving names."""
    stream = _tokens(text)

    def next_token(what):
        try:
            return next(stream)
        except StopIteration:
            raise ScoreFormatError("unexpected end of input, expected %s" % what) from None

    def read_int(what):
        lineno, tok = next_token(what)
        try:
            value = int(tok)
        except ValueError:
            raise ScoreFormatError("line %d: malformed %s %r" % (lineno, what, tok)) from None
        if value < 0:
            raise ScoreFormatError("line %d: negative %s" % (lineno, what))
        return value

    p = read_int("variable count")
    blocks = []
    for _ in range(p):
        _, name = next_token("variable name")
        nrows = read_int("scored-set count")
        rows = []
        for _ in range(nrows):
            lineno, tok = next_token("score")
            try:
                score = float(tok)
            except ValueError:
                raise ScoreFormatError("line %d: malformed score %r" % (lineno, tok)) from None
            k = read_int("parent count")
            parents = tuple(next_token("parent name")[1] for _ in range(k))
            rows.append((score, parents))
        blocks.append((name, tuple(rows)))
    for lineno, tok in stream:
        raise ScoreFormatError("line %d: trailing token %r" % (lineno, tok))
    return ScoreFile(tuple(blocks))


def parse_scores(text: str, palim: int | None = None) -> BnslInstance:
    """Parse a score file directly to a :class:`BnslInstance`."""
    inst, _ = parse_score_file(text).to_instance(palim)
    return inst


def format_score(value: float) -> str:
    return repr(float(value))


def write_scores(inst: BnslInstance) -> str:
    """Emit the score-file text for an instance.

    Output is deterministic: nodes in index order, rows per node by
    descending score (ties by parent list), so ``parse(write(inst))``
    reproduces the instance exactly.
    """
    out = [str(inst.p)]
    for i in range(inst.p):
        rows = []
        for ps in inst.permitted[i]:
            names = tuple(inst.names[j] for j in ps)
            rows.append((-inst.scores[Family(i, ps)], names))
        rows.sort()
        out.append("%s %d" % (inst.names[i], len(rows)))
        for negscore, names in rows:
            out.append("%s %d%s" % (format_score(-negscore), len(names),
                                    "".join(" " + n for n in names)))
    return "\n".join(out) + "\n"


def render_parent_set(names: Iterable[str]) -> str:
    return "{%s}" % ",".join(names)


def write_solution(result, inst: BnslInstance) -> str:
    """Render a solve result: one family line per node, then summary lines."""
    lines = []
    for i, ps in enumerate(result.assignment):
        shown = render_parent_set(inst.names[j] for j in ps)
        lines.append("%s <- %s %s" % (inst.names[i], shown,
                                      format_score(inst.scores[Family(i, ps)])))
    lines.append("objective %s" % format_score(result.objective))
    lines.append("bound %s" % format_score(result.upper_bound))
    lines.append("gap %s" % format_score(result.gap))
    lines.append("nodes %d" % result.stats["nodes"])
    lines.append("cuts %d" % result.stats["cuts"])
    return "\n".join(lines) + "\n"


def parse_solution_assignment(text: str, inst: BnslInstance):
    """Read the family lines of a solution report back into an assignment."""
    index = {name: i for i, name in enumerate(inst.names)}
    chosen = {}
    for line in text.splitlines():
        parts = line.split()
        if len(parts) != 4 or parts[1] != "<-":
            continue
        name, braces = parts[0], parts[2]
        if name not in index or not (braces.startswith("{") and braces.endswith("}")):
            continue
        inner = braces[1:-1]
        parents = tuple(sorted(index[n] for n in inner.split(",") if n))
        chosen[index[name]] = parents
    if set(chosen) != set(range(inst.p)):
        raise ScoreFormatError("solution block does not cover every node")
    return tuple(chosen[i] for i in range(inst.p))
