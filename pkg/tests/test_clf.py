import pytest
from hypothesis import given
from hypothesis import strategies as st

from codeclass.clf import CLFError, format_clf, parse_clf, read_clf, write_clf
from codeclass.code import LinearCode
from helpers import codes


@given(st.sampled_from([2, 3, 4]).flatmap(lambda q: st.lists(codes(qs=(q,)), max_size=5).map(lambda cs: (q, cs))))
def test_round_trip(qcs):
    q, cs = qcs
    text = format_clf(q, cs, ["made by a test"])
    back = parse_clf(text)
    assert back.q == q
    assert back.comments == ["made by a test"]
    assert [c.gen.tolist() for c in back.codes] == [c.gen.tolist() for c in cs]
    assert format_clf(q, back.codes, back.comments) == text


def test_file_round_trip(tmp_path):
    cs = [LinearCode.from_rows("1021 0112", 3), LinearCode.from_rows("1111", 3)]
    path = tmp_path / "x.clf"
    write_clf(path, 3, cs, ["a"])
    assert [c for c in read_clf(path).codes] == cs
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".tmp-")]


def test_comments_and_blank_lines():
    text = "# leading\n\nCLF 1 q=2\n# note\ncode n=3 k=1\n111\n\n\ncode n=2 k=2\n10\n01\n"
    lst = parse_clf(text)
    assert len(lst.codes) == 2 and lst.comments == ["note"]


@pytest.mark.parametrize(
    "text,line",
    [
        ("CLF 2 q=2\n", 1),
        ("CLF 1 q=5\n", 1),
        ("hello\n", 1),
        ("CLF 1 q=2\ncode n=3\n111\n", 2),
        ("CLF 1 q=2\ncode n=3 k=1\n121\n", 3),
        ("CLF 1 q=2\ncode n=3 k=1\n11\n", 3),
        ("CLF 1 q=2\n\ncode n=3 k=2\n111\n", 4),
        ("CLF 1 q=2\ncode n=3 k=2\n111\n111\n", 2),
        ("CLF 1 q=2\ncode n=2 k=3\n11\n11\n11\n", 2),
        ("", 1),
    ],
)
def test_parse_errors_report_lines(text, line):
    with pytest.raises(CLFError) as exc:
        parse_clf(text)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_field_mismatch():
    with pytest.raises(ValueError):
        format_clf(2, [LinearCode.from_rows("12", 3)])
