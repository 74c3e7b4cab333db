import json
import random
import socket
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from conftest import transparency_example
from cotbench.backends import (
    BackendRejected,
    BackendUnavailable,
    CorruptOracle,
    DecodeConfig,
    GoldOracle,
    HttpCompletion,
    Scripted,
    Timeout,
    complete,
    infer_rule,
    parse_test_block,
)
from cotbench.generate import generate_example
from cotbench.grammar import realize_chain
from cotbench.logic import DeductionRule
from cotbench.prompts import build_prontoqa_prompt
from cotbench.proofcheck import check_strict

DECODE = DecodeConfig()


@pytest.fixture
def server():
    """Local completions endpoint whose behavior is set per test."""
    state = {"handler": None, "requests": []}

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            body = json.loads(self.rfile.read(length) or b"{}")
            state["requests"].append({"path": self.path, "body": body,
                                      "auth": self.headers.get("Authorization")})
            status, payload = state["handler"](body)
            data = payload if isinstance(payload, bytes) else json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def log_message(self, *args):
            pass

    httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    state["url"] = f"http://127.0.0.1:{httpd.server_address[1]}"
    yield state
    httpd.shutdown()
    thread.join(timeout=2)


def test_gold_oracle_round_trip_for_every_rule():
    rng = random.Random(5)
    oracle = GoldOracle()
    for rule in DeductionRule:
        for _ in range(5):
            example = generate_example(rule, rng)
            prompt = build_prontoqa_prompt([], example)
            output = complete(oracle, prompt, DECODE)
            assert output == realize_chain(example.gold)
            assert check_strict(output, example).correct


def test_gold_oracle_with_exemplars(wren_example):
    rng = random.Random(6)
    exemplars = [generate_example(DeductionRule.IMPLICATION_ELIMINATION, rng) for _ in range(3)]
    prompt = build_prontoqa_prompt(exemplars, wren_example)
    assert complete(GoldOracle(), prompt, DECODE) == (
        "Wren is a sterpus. Sterpuses are transparent. Wren is transparent."
    )


def test_gold_oracle_answers_mcq_by_id():
    oracle = GoldOracle(answer_keys={"q7": "D"})
    out = oracle.complete("stem Answer Choices: (a) x", DECODE, question_id="q7")
    assert out == "So the answer is (d)."


def test_infer_rule_covers_all_shapes():
    rng = random.Random(8)
    for rule in DeductionRule:
        example = generate_example(rule, rng)
        assert infer_rule(example.premises, example.conclusion) is rule


def test_parse_test_block_rejects_non_question():
    with pytest.raises(ValueError):
        parse_test_block("no question here", None)


def test_corrupt_oracle_repeats_premise_noun(wren_example):
    prompt = build_prontoqa_prompt([], wren_example)
    output = CorruptOracle().complete(prompt, DECODE)
    assert output == "Wren is a sterpus. Sterpuses are transparent. Wren is a sterpus."
    verdict = check_strict(output, wren_example)
    assert not verdict.correct and verdict.first_divergence.step == 3


def test_corrupt_oracle_other_policies(wren_example):
    prompt = build_prontoqa_prompt([], wren_example)
    truncated = CorruptOracle(policy="truncate_final").complete(prompt, DECODE)
    assert truncated == "Wren is a sterpus. Sterpuses are transparent."
    garbled = CorruptOracle(policy="garble").complete(prompt, DECODE)
    assert not check_strict(garbled, wren_example).correct
    with pytest.raises(ValueError):
        CorruptOracle(policy="made_up")


def test_scripted_backend():
    backend = Scripted({"q1": "hello"})
    assert backend.complete("prompt", DECODE, question_id="q1") == "hello"
    with pytest.raises(BackendRejected):
        backend.complete("prompt", DECODE, question_id="q2")


def test_complete_requires_prompt():
    with pytest.raises(ValueError):
        complete(Scripted({}), "", DECODE)


def test_http_success_and_request_shape(server, monkeypatch):
    monkeypatch.setenv("COTBENCH_API_TOKEN", "sekrit")
    server["handler"] = lambda body: (200, {"choices": [{"text": "the completion"}]})
    backend = HttpCompletion(server["url"], "test-model", timeout=5.0)
    config = DecodeConfig(max_new_tokens=256, greedy=True, repetition_penalty=0.0001)
    assert backend.complete("a prompt", config) == "the completion"
    request = server["requests"][0]
    assert request["path"] == "/completions"
    assert request["body"] == {
        "model": "test-model",
        "prompt": "a prompt",
        "max_tokens": 256,
        "temperature": 0.0,
        "repetition_penalty": 0.0001,
    }
    assert request["auth"] == "Bearer sekrit"


def test_http_repetition_penalty_can_be_withheld(server):
    server["handler"] = lambda body: (200, {"choices": [{"text": "ok"}]})
    backend = HttpCompletion(server["url"], "m", send_repetition_penalty=False, timeout=5.0)
    backend.complete("p", DECODE)
    assert "repetition_penalty" not in server["requests"][0]["body"]


def test_http_retries_transient_then_succeeds(server):
    calls = {"n": 0}

    def flaky(body):
        calls["n"] += 1
        if calls["n"] < 3:
            return 503, {"error": "warming up"}
        return 200, {"choices": [{"text": "recovered"}]}

    server["handler"] = flaky
    backend = HttpCompletion(server["url"], "m", retries=2, backoff=0.01, timeout=5.0)
    assert backend.complete("p", DECODE) == "recovered"
    assert calls["n"] == 3


def test_http_persistent_5xx_raises_unavailable(server):
    server["handler"] = lambda body: (503, {"error": "down"})
    backend = HttpCompletion(server["url"], "m", retries=1, backoff=0.01, timeout=5.0)
    with pytest.raises(BackendUnavailable):
        backend.complete("p", DECODE)


def test_http_4xx_raises_rejected_without_retry(server):
    calls = {"n": 0}

    def reject(body):
        calls["n"] += 1
        return 404, {"error": "no such model"}

    server["handler"] = reject
    backend = HttpCompletion(server["url"], "m", retries=3, backoff=0.01, timeout=5.0)
    with pytest.raises(BackendRejected):
        backend.complete("p", DECODE)
    assert calls["n"] == 1


def test_http_malformed_response_rejected(server):
    server["handler"] = lambda body: (200, {"unexpected": True})
    backend = HttpCompletion(server["url"], "m", timeout=5.0)
    with pytest.raises(BackendRejected):
        backend.complete("p", DECODE)
    server["handler"] = lambda body: (200, b"not json at all")
    with pytest.raises(BackendRejected):
        backend.complete("p", DECODE)


def test_http_dead_port_unavailable():
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        dead_port = probe.getsockname()[1]
    backend = HttpCompletion(f"http://127.0.0.1:{dead_port}", "m", retries=0, timeout=1.0)
    with pytest.raises(BackendUnavailable):
        backend.complete("p", DECODE)


def test_http_timeout(server):
    def slow(body):
        time.sleep(0.8)
        return 200, {"choices": [{"text": "late"}]}

    server["handler"] = slow
    backend = HttpCompletion(server["url"], "m", retries=0, timeout=0.2)
    with pytest.raises(Timeout):
        backend.complete("p", DECODE)
