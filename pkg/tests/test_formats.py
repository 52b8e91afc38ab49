from pathlib import Path

import pytest

from streett_det.determinize import build_dpta, build_dra, build_drta
from streett_det.errors import DomainError, ParseError, SemanticError, UnsupportedFeatureError
from streett_det.formats import HOA, NATIVE, emit_automaton, parse_automaton
from streett_det.generators import FullStreettFamily, GenSpec, random_nsa
from streett_det.omega import StreettNSA

GOLDEN = Path(__file__).parent / "golden"


def round_trip(a, fmt):
    text = emit_automaton(a, fmt)
    back = parse_automaton(text)
    assert back == a
    assert emit_automaton(back, fmt) == text
    assert emit_automaton(a, fmt) == text


def test_fixture_parses():
    nsa = parse_automaton((GOLDEN / "one_state.nsa").read_text(encoding="utf-8"))
    assert isinstance(nsa, StreettNSA)
    assert (nsa.n, nsa.alphabet.size, nsa.k) == (1, 1, 1)
    assert nsa.pairs == ((frozenset({0}), frozenset()),)


def test_nsa_round_trips():
    family = FullStreettFamily(2, 1)
    transition_based = family.restrict(family.sample(4, seed=2))
    for seed in range(10):
        nsa = random_nsa(GenSpec(1 + seed % 3, seed % 3, 2, 0.5, 0.4, seed))
        for fmt in (NATIVE, HOA):
            round_trip(nsa, fmt)
    round_trip(transition_based, NATIVE)
    round_trip(family.restrict(family.sample(4, seed=3)), NATIVE)


def test_deterministic_round_trips():
    for seed in range(8):
        nsa = random_nsa(GenSpec(1 + seed % 3, 1 + seed % 2, 2, 0.6, 0.4, seed))
        for build in (build_drta, build_dpta, build_dra):
            for fmt in (NATIVE, HOA):
                round_trip(build(nsa), fmt)


def test_dpta_lists_every_transition_with_priority():
    nsa = parse_automaton((GOLDEN / "one_state.nsa").read_text(encoding="utf-8"))
    text = emit_automaton(build_dpta(nsa))
    assert [line for line in text.splitlines() if line.startswith("t ")] == ["t 0 s 0 p=2"]


def test_extra_pair_is_semantic():
    text = "nsa n=1 k=1 sigma=1\ninit 0\nt 0 0 0\npair 1 G=0 B=-\npair 2 G=- B=-\n"
    with pytest.raises(SemanticError):
        parse_automaton(text)


def test_duplicate_header_is_semantic():
    with pytest.raises(SemanticError):
        parse_automaton("nsa n=1 k=0 sigma=1\nnsa n=1 k=0 sigma=1\ninit 0\n")


def test_dangling_state_is_semantic():
    with pytest.raises(SemanticError) as info:
        parse_automaton("nsa n=1 k=0 sigma=1\ninit 0\nt 0 0 3\n")
    assert (info.value.line, info.value.column) == (3, 7)


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_automaton("nsa n=1 k=0 sigma=1\ninit 0\nt 0 0 x\n")
    assert not isinstance(info.value, SemanticError)
    assert info.value.line == 3
    with pytest.raises(ParseError):
        parse_automaton("nsa n=1 k=0 sigma=1\nbogus line\n")


def test_missing_pair_is_semantic():
    with pytest.raises(SemanticError):
        parse_automaton("nsa n=1 k=2 sigma=1\ninit 0\npair 1 G=- B=-\n")


def test_non_total_deterministic_input():
    text = "drta n=1 k=1 mu=1 sigma=2 states=1\ninit 0\nstate 0 x\nt 0 0 0 acc=- rej=-\n"
    with pytest.raises(SemanticError):
        parse_automaton(text)


HOA_HEAD = "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"p0\"\nacc-name: Streett 1\nAcceptance: 2 (Fin(0)|Inf(1))\n"


def test_hoa_minimal_streett():
    nsa = parse_automaton(HOA_HEAD + "--BODY--\nState: 0 {1}\n[0] 0\n[!0] 0\n--END--\n")
    assert nsa.alphabet.size == 2 and nsa.pairs == ((frozenset({0}), frozenset()),)


def test_hoa_unsupported_features():
    with pytest.raises(UnsupportedFeatureError):
        parse_automaton(HOA_HEAD + "--BODY--\nState: 0\n0\n--END--\n")
    with pytest.raises(UnsupportedFeatureError):
        parse_automaton(HOA_HEAD + "--BODY--\nState: 0\n[0 | !0] 0\n--END--\n")
    with pytest.raises(UnsupportedFeatureError):
        parse_automaton(HOA_HEAD.replace("Start: 0", "Start: 0&0") + "--BODY--\n--END--\n")
    with pytest.raises(UnsupportedFeatureError):
        parse_automaton(HOA_HEAD.replace("Streett 1", "Buchi") + "--BODY--\n--END--\n")
    with pytest.raises(UnsupportedFeatureError):
        parse_automaton(HOA_HEAD + "controllable-AP: 0\n--BODY--\n--END--\n")


def test_hoa_semantic_errors():
    with pytest.raises(SemanticError):
        parse_automaton(HOA_HEAD + "States: 1\n--BODY--\n--END--\n")
    with pytest.raises(SemanticError):
        parse_automaton(HOA_HEAD + "--BODY--\nState: 0\n[0] 4\n--END--\n")


def test_hoa_needs_power_of_two_alphabet():
    nsa = random_nsa(GenSpec(1, 1, 3, seed=0))
    with pytest.raises(DomainError):
        emit_automaton(nsa, HOA)
    with pytest.raises(DomainError):
        emit_automaton(nsa, "dot")


def test_comments_and_format_detection():
    nsa = random_nsa(GenSpec(2, 1, 2, seed=1))
    text = "/* leading\ncomment */ " + emit_automaton(nsa, HOA).replace("--BODY--", "--BODY-- /* \"x\" */")
    assert parse_automaton(text) == nsa
    assert parse_automaton("# note\n" + emit_automaton(nsa, NATIVE)) == nsa
