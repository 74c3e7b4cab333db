from hypothesis import given, strategies as st

from cotbench.extract import McqOutcome, McqResult, extract_cot, extract_csqa


def test_csqa_correct_case_insensitive():
    prompt = "setup text"
    raw = prompt + " reasoning... So the answer is (b)."
    assert extract_csqa(raw, prompt, "B") == McqOutcome(McqResult.CORRECT, "b")
    raw_upper = prompt + " So the answer is (B)."
    assert extract_csqa(raw_upper, prompt, "b") == McqOutcome(McqResult.CORRECT, "B")


def test_csqa_incorrect():
    outcome = extract_csqa("... So the answer is (a).", "", "B")
    assert outcome.result is McqResult.INCORRECT
    assert outcome.extracted == "a"


def test_csqa_no_answer_paths():
    assert extract_csqa("I think the answer is obvious.", "", "C").result is McqResult.NO_ANSWER
    assert extract_csqa("So the answer is (", "", "C").result is McqResult.NO_ANSWER
    assert extract_csqa("So the answer is (ab).", "", "C").result is McqResult.NO_ANSWER
    assert extract_csqa("So the answer is (f).", "", "C").result is McqResult.NO_ANSWER
    assert extract_csqa("", "", "C").result is McqResult.NO_ANSWER


def test_csqa_uses_first_marker():
    raw = "So the answer is (a). Wait. So the answer is (b)."
    assert extract_csqa(raw, "", "B").result is McqResult.INCORRECT


def test_csqa_prompt_removed_before_search():
    # The marker inside the prompt (an exemplar) must not be picked up.
    prompt = "Q: example? So the answer is (e).\nQ: real question?\n"
    raw = prompt + "thinking. So the answer is (c)."
    assert extract_csqa(raw, prompt, "C").result is McqResult.CORRECT


def test_csqa_total_over_arbitrary_bytes():
    @given(st.text(max_size=200), st.text(max_size=50))
    def run(raw, prompt):
        outcome = extract_csqa(raw, prompt, "a")
        assert outcome.result in (McqResult.CORRECT, McqResult.INCORRECT, McqResult.NO_ANSWER)

    run()


def test_cot_extraction():
    prompt = "Q: Sterpuses are transparent. Wren is a sterpus. Prove: Wren is transparent.\nA: "
    raw = prompt + "Wren is a sterpus. Sterpuses are transparent. Wren is transparent.\n\nQ: next"
    assert extract_cot(raw, prompt) == (
        "Wren is a sterpus. Sterpuses are transparent. Wren is transparent."
    )


def test_cot_without_marker_returns_remainder():
    prompt = "<prompt>"
    raw = prompt + "Wren is a sterpus. Sterpuses are transparent. Wren is a sterpus."
    assert extract_cot(raw, prompt) == (
        "Wren is a sterpus. Sterpuses are transparent. Wren is a sterpus."
    )


def test_cot_empty_continuation():
    assert extract_cot("<prompt>", "<prompt>") == ""


def test_cot_idempotent():
    raw = "  Wren is a sterpus. Sterpuses are transparent.  \n\nQ: more"
    once = extract_cot(raw, "")
    assert extract_cot(once, "") == once


def test_prefix_removal_tolerates_normalization():
    # Backend echoed the prompt without the trailing space after "A:".
    prompt = "Q: Sterpuses are transparent. Prove: y.\nA: "
    raw = "Q: Sterpuses are transparent. Prove: y.\nA:Wren is transparent."
    assert extract_cot(raw, prompt) == "Wren is transparent."


def test_non_echoing_backend_passthrough():
    prompt = "Q: Sterpuses are transparent. Prove: y.\nA: "
    raw = "Wren is transparent."
    assert extract_cot(raw, prompt) == "Wren is transparent."
