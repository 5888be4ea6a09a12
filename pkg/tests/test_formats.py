import json
import re
from fractions import Fraction as F

import pytest

from certsel import ParseError, ValidationError, letters_digits, solve_dcs_exact
from certsel.formats import (
    DuplicateEdgeWarning,
    deserialize_instance,
    export_dot,
    fmt_ratio,
    format_set_system,
    format_source_graph,
    instance_to_doc,
    parse_ratio,
    parse_set_system,
    parse_source_graph,
    serialize_instance,
)
from certsel.generators import path_sets, triangle

NODE = re.compile(r'^\s*"[^"]+" \[', re.M)
EDGE = re.compile(r'^\s*"[^"]+" -- "[^"]+"', re.M)


def test_round_trip(T1):
    assert deserialize_instance(serialize_instance(T1)) == T1


def test_round_trip_keeps_metadata(T1):
    doc = instance_to_doc(T1)
    doc["metadata"]["custom"] = {"nested": [1, 2]}
    back = deserialize_instance(json.dumps(doc))
    assert back.metadata["custom"] == {"nested": [1, 2]}
    assert instance_to_doc(back) == doc


def test_unknown_id_rejected(T1):
    doc = instance_to_doc(T1)
    doc["edges"].append(["x1", "ghost"])
    with pytest.raises(ValidationError) as err:
        deserialize_instance(json.dumps(doc))
    assert "ghost" in str(err.value)


def test_duplicate_edge_collapsed(T1):
    doc = instance_to_doc(T1)
    doc["edges"].append(["x1", "a"])
    with pytest.warns(DuplicateEdgeWarning):
        back = deserialize_instance(json.dumps(doc))
    assert back == T1


@pytest.mark.parametrize("text", ["{not json", "[]", '{"format_version": "1"}',
                                  '{"format_version": "9", "in_class": []}'])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        deserialize_instance(text)


def test_ratios():
    assert fmt_ratio(4) == "4/1"
    assert fmt_ratio(F(2, 4)) == "1/2"
    assert parse_ratio("3/6") == F(1, 2)
    assert parse_ratio("0/1") == 0
    for bad in ("0.5", "1/0", "x"):
        with pytest.raises(ParseError):
            parse_ratio(bad)


def test_dot_t1(T1):
    text = export_dot(T1)
    assert len(NODE.findall(text)) == 5
    assert len(EDGE.findall(text)) == 4
    assert text == export_dot(T1)


def test_dot_marks_solution(T1):
    sol = solve_dcs_exact(T1, 0, 0)
    text = export_dot(T1, sol)
    line = next(l for l in text.splitlines() if l.strip().startswith('"a" ['))
    assert 'class="accepted"' in line
    assert 'class="accepted"' not in next(l for l in text.splitlines() if l.strip().startswith('"b" ['))
    assert text.count('class="prover"') == 2


def test_dot_letters_digits_ranks():
    text = export_dot(letters_digits(2))
    # 2n+2 datapoints and 2n certificates; 4n edges
    assert len(NODE.findall(text)) == 10
    assert len(EDGE.findall(text)) == 8
    assert text.count("rank=same") == 3


def test_source_formats():
    g = parse_source_graph("# triangle\ngraph\n1 2\n2 3\n1 3\n")
    assert g == triangle()
    assert parse_source_graph(format_source_graph(g)) == g
    assert parse_source_graph("graph 9\n1 2\n").vertices == ("1", "2", "9")
    s = parse_set_system("sets\n1 2\n2 3\n3 4\n")
    assert s == path_sets()
    assert parse_set_system(format_set_system(s)) == s
    with pytest.raises(ParseError):
        parse_source_graph("1 2\n")
    with pytest.raises(ParseError):
        parse_source_graph("graph\n1 2 3\n")
