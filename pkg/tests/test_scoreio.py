import random

import pytest

from dagip.model import BnslInstance, Family
from dagip.scoreio import (ScoreFormatError, parse_score_file, parse_scores,
                           parse_solution_assignment, write_scores,
                           write_solution)
from dagip.solver import solve

from helpers import random_full_instance

THREE_NODE_FULL = """3
a 4
0.0 0
-1.0 1 b
2.0 1 c
0.5 2 b c
b 4
0.0 0
1.0 1 a
1.5 1 c
-0.5 2 a c
c 4
1.0 0
0.25 1 a
0.5 1 b
3.0 2 a b
"""


def test_parse_full_three_node_file():
    inst = parse_scores(THREE_NODE_FULL)
    assert inst.p == 3
    assert sum(len(s) for s in inst.permitted) == 12
    assert inst.score(0, (1, 2)) == 0.5
    assert inst.score(2, ()) == 1.0


def test_comments_and_spacing_ignored():
    text = "2 # two vars\na 2 # block\n 0.0  0\n1e1 1 b # score ten\nb 1\n0 0\n"
    inst = parse_scores(text)
    assert inst.score(0, (1,)) == 10.0


def test_missing_empty_set_rejected():
    text = "2\na 1\n1.0 1 b\nb 1\n0.0 0\n"
    with pytest.raises(ScoreFormatError, match="empty parent set"):
        parse_scores(text)


def test_unknown_parent_rejected():
    text = "1\na 2\n0.0 0\n1.0 1 z\n"
    with pytest.raises(ScoreFormatError, match="unknown parent"):
        parse_scores(text)


def test_duplicate_family_rejected():
    text = "2\na 3\n0.0 0\n1.0 1 b\n2.0 1 b\nb 1\n0.0 0\n"
    with pytest.raises(ScoreFormatError, match="duplicate family"):
        parse_scores(text)


def test_own_parent_rejected():
    text = "2\na 2\n0.0 0\n1.0 1 a\nb 1\n0.0 0\n"
    with pytest.raises(ScoreFormatError, match="own parent"):
        parse_scores(text)


def test_malformed_number_rejected():
    text = "2\na 2\n0.0 0\nxyz 1 b\nb 1\n0.0 0\n"
    with pytest.raises(ScoreFormatError, match="malformed score"):
        parse_scores(text)


def test_trailing_tokens_rejected():
    with pytest.raises(ScoreFormatError, match="trailing"):
        parse_scores("1\na 1\n0.0 0\nstray\n")


def test_palim_drops_wide_rows():
    sf = parse_score_file(THREE_NODE_FULL)
    inst, dropped = sf.to_instance(palim=1)
    assert dropped == 3
    assert all(len(ps) <= 1 for sets in inst.permitted for ps in sets)
    assert inst.kappa == 1


def test_single_token_corruptions_rejected():
    corruptions = [
        THREE_NODE_FULL.replace("3\n", "4\n", 1),          # wrong count
        THREE_NODE_FULL.replace("3\n", "x\n", 1),          # bad count
        THREE_NODE_FULL.replace("a 4", "a 5", 1),          # wrong row count
        THREE_NODE_FULL.replace("0.5 2 b c", "0.5 2 b b"), # duplicate parent
        THREE_NODE_FULL.replace("0.5 2 b c", "0.5 2 b a"), # own parent
        THREE_NODE_FULL.replace("0.5 2 b c", "0.5 2 b z"), # unknown name
        THREE_NODE_FULL.replace("0.5 2 b c", "0.5 3 b c"), # parent count high
        THREE_NODE_FULL.replace("-1.0 1 b", "oops 1 b"),   # malformed score
        THREE_NODE_FULL.replace("b 4", "a 4", 1),          # duplicate variable
    ]
    for text in corruptions:
        with pytest.raises(ScoreFormatError):
            parse_scores(text)


def test_round_trip_random_instances():
    rng = random.Random(11)
    for trial in range(50):
        p = rng.randint(1, 5)
        inst = random_full_instance(rng, p, kappa=rng.choice([None, 2]))
        if inst.kappa is None:
            # Drop the cap marker: the file format does not carry it.
            inst = BnslInstance(inst.names, inst.permitted, inst.scores)
            again = parse_scores(write_scores(inst))
        else:
            again = parse_scores(write_scores(inst), palim=inst.kappa)
        assert again.names == inst.names
        assert again.permitted == inst.permitted
        assert again.scores == inst.scores


def test_write_is_deterministic_and_sorted_by_score():
    rng = random.Random(3)
    inst = random_full_instance(rng, 3)
    text = write_scores(inst)
    assert text == write_scores(inst)
    lines = text.splitlines()
    scores = [float(line.split()[0]) for line in lines[2:6]]
    assert scores == sorted(scores, reverse=True)


def test_empty_only_and_zero_instances():
    inst = BnslInstance(("a", "b"), (((),), ((),)),
                        {Family(0, ()): 1.5, Family(1, ()): -0.5})
    text = write_scores(inst)
    assert text.splitlines()[0] == "2"
    assert parse_scores(text).scores == inst.scores
    empty = BnslInstance((), (), {})
    assert write_scores(empty) == "0\n"
    assert parse_scores("0").p == 0


def test_solution_report_round_trip():
    inst = parse_scores(THREE_NODE_FULL)
    result = solve(inst)
    text = write_solution(result, inst)
    lines = text.splitlines()
    assert lines[-5].startswith("objective ")
    assert lines[-4].startswith("bound ")
    assert lines[-3].startswith("gap ")
    assert lines[-2].startswith("nodes ")
    assert lines[-1].startswith("cuts ")
    assert parse_solution_assignment(text, inst) == result.assignment


def test_solution_report_empty_graph():
    inst = BnslInstance.full(2, lambda f: -1.0 if f.parents else 0.0)
    result = solve(inst)
    text = write_solution(result, inst)
    assert "a <- {} 0.0" in text and "b <- {} 0.0" in text
