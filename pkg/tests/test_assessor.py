import json

import pytest

import java_fixtures
from conftest import SAMPLE_BC_OUTPUT
from reforacle import assessor, java_executor
from reforacle.assessor import (
    PARSE_ERROR,
    SAID_BC_TEST_NOT_COMPILING,
    SAID_BC_TEST_NOT_DISCRIMINATING,
    SAID_BC_VALID,
    SAID_CE,
    SAID_UNKNOWN,
    SAID_YES,
    AssessmentOutcome,
    assess,
    assess_preserving,
    correct_answer_label,
    read_outcomes,
    write_outcomes,
)
from reforacle.dataset import BugInstance, SourceSet
from reforacle.java_executor import FAIL, PASS, MockToolchain
from reforacle.model_client import RawModelResponse
from reforacle.prompting import DIFF_ONLY, FULL_SOURCE
from reforacle.verdict_parser import parse_response


def src(**files):
    return SourceSet(files=tuple(sorted(files.items())))


def instance(fixture) -> BugInstance:
    return BugInstance(
        id=fixture.id,
        tool=fixture.tool,
        refactoring_type=fixture.refactoring,
        label=fixture.label,
        original=src(**fixture.original),
        resulting=src(**fixture.resulting),
        exposing_test=fixture.test,
    )


BC_INSTANCE = instance(java_fixtures.BC_FIXTURES[0])  # Push Down Method pair
CE_INSTANCE = instance(java_fixtures.CE_FIXTURES[0])  # Inline Variable pair
PRESERVING_INSTANCE = instance(java_fixtures.PRESERVING_FIXTURES[0])


def raw(text: str) -> RawModelResponse:
    return RawModelResponse(
        text=text,
        latency_s=0.25,
        attempt_index=1,
        backend_name="m",
        created_at="2026-01-01T00:00:00+00:00",
    )


def verdict_of(verdict: str, junit_test=None, mode=FULL_SOURCE):
    doc = {"verdict": verdict, "explanation": "because", "junit_test": junit_test}
    if mode == DIFF_ONLY:
        doc.pop("junit_test")
    return parse_response(raw(json.dumps(doc)), mode)


def discriminating_mock(inst: BugInstance, test_source: str) -> MockToolchain:
    toolchain = MockToolchain()
    toolchain.script_run(inst.original, test_source, PASS)
    toolchain.script_run(inst.resulting, test_source, FAIL)
    return toolchain


class TestBugAssessment:
    def test_ce_verdict_on_ce_instance_correct(self):
        outcome = assess(CE_INSTANCE, verdict_of("NO - COMPILATION ERROR"), MockToolchain())
        assert outcome.correct
        assert outcome.answer_label == SAID_CE

    def test_ce_verdict_on_bc_instance_incorrect(self):
        outcome = assess(BC_INSTANCE, verdict_of("NO - COMPILATION ERROR"), MockToolchain())
        assert not outcome.correct
        assert outcome.answer_label == SAID_CE

    def test_yes_always_incorrect_on_bugs(self):
        for inst in (BC_INSTANCE, CE_INSTANCE):
            outcome = assess(inst, verdict_of("YES"), MockToolchain())
            assert not outcome.correct
            assert outcome.answer_label == SAID_YES

    def test_bc_with_discriminating_test_correct(self):
        verdict = parse_response(raw(SAMPLE_BC_OUTPUT), FULL_SOURCE)
        toolchain = discriminating_mock(BC_INSTANCE, verdict.junit_test)
        outcome = assess(BC_INSTANCE, verdict, toolchain)
        assert outcome.correct
        assert outcome.answer_label == SAID_BC_VALID
        assert outcome.evidence is not None and outcome.evidence.discriminates

    def test_bc_with_vacuous_test_not_discriminating(self):
        verdict = verdict_of("NO - BEHAVIOR CHANGE", junit_test=java_fixtures.VACUOUS_TEST)
        outcome = assess(BC_INSTANCE, verdict, MockToolchain())  # passes on both
        assert not outcome.correct
        assert outcome.answer_label == SAID_BC_TEST_NOT_DISCRIMINATING

    def test_bc_with_missing_test_not_compiling(self):
        verdict = verdict_of("NO - BEHAVIOR CHANGE", junit_test=None)
        outcome = assess(BC_INSTANCE, verdict, MockToolchain())
        assert not outcome.correct
        assert outcome.answer_label == SAID_BC_TEST_NOT_COMPILING

    def test_bc_with_malformed_test_not_compiling(self):
        verdict = verdict_of(
            "NO - BEHAVIOR CHANGE", junit_test="public class A {}\npublic class B {}"
        )
        outcome = assess(BC_INSTANCE, verdict, MockToolchain())
        assert outcome.answer_label == SAID_BC_TEST_NOT_COMPILING

    def test_bc_claim_on_ce_instance_never_correct(self):
        verdict = verdict_of("NO - BEHAVIOR CHANGE", junit_test=java_fixtures.VACUOUS_TEST)
        toolchain = MockToolchain()
        toolchain.script_compile(CE_INSTANCE.resulting, success=False)
        outcome = assess(CE_INSTANCE, verdict, toolchain)
        assert not outcome.correct
        assert outcome.answer_label == SAID_BC_TEST_NOT_COMPILING

    def test_reflective_test_counts_as_non_discriminating(self):
        reflective = java_fixtures.REFLECTIVE_TEST
        verdict = verdict_of("NO - BEHAVIOR CHANGE", junit_test=reflective)
        toolchain = MockToolchain()
        toolchain.script_run(BC_INSTANCE.original, reflective, PASS)
        toolchain.script_run(BC_INSTANCE.resulting, reflective, FAIL)
        outcome = assess(BC_INSTANCE, verdict, toolchain)
        assert outcome.reflective_test
        assert outcome.answer_label == SAID_BC_TEST_NOT_DISCRIMINATING
        assert not outcome.correct

    def test_parse_failure_maps_to_parse_error(self):
        failure = parse_response(raw("not json at all"), FULL_SOURCE)
        outcome = assess(CE_INSTANCE, failure, MockToolchain())
        assert outcome.answer_label == PARSE_ERROR
        assert outcome.parse_reason == "NotJson"
        assert not outcome.correct

    def test_unknown_in_diff_mode_tallied_separately(self):
        verdict = verdict_of("UNKNOWN", mode=DIFF_ONLY)
        outcome = assess(CE_INSTANCE, verdict, MockToolchain())
        assert outcome.answer_label == SAID_UNKNOWN
        assert not outcome.correct

    def test_toolchain_failure_is_inconclusive(self):
        verdict = verdict_of("NO - BEHAVIOR CHANGE", junit_test=java_fixtures.VACUOUS_TEST)

        class Broken:
            def version(self):
                return "broken"

            def check_discriminating(self, *a, **k):
                raise java_executor.ToolchainUnavailable("no jdk")

        outcome = assess(BC_INSTANCE, verdict, Broken())
        assert outcome.inconclusive
        assert not outcome.correct

    def test_rejects_preserving_instances(self):
        with pytest.raises(ValueError):
            assess(PRESERVING_INSTANCE, verdict_of("YES"), MockToolchain())

    def test_telemetry_copied(self):
        response = RawModelResponse(
            text=json.dumps({"verdict": "YES", "explanation": "e", "junit_test": None}),
            latency_s=3.5,
            attempt_index=4,
            backend_name="gpt-x",
            created_at="2026-01-01T00:00:00+00:00",
            tokens_in=1000,
            tokens_out=50,
            cost_estimate=0.01,
        )
        verdict = parse_response(response, FULL_SOURCE)
        outcome = assess(CE_INSTANCE, verdict, MockToolchain())
        assert outcome.latency_s == 3.5
        assert outcome.attempt_index == 4
        assert outcome.backend_name == "gpt-x"
        assert outcome.tokens_in == 1000
        assert outcome.cost_estimate == 0.01


class TestPreservingAssessment:
    def test_yes_is_correct(self):
        outcome = assess_preserving(PRESERVING_INSTANCE, verdict_of("YES"))
        assert outcome.correct
        assert outcome.answer_label == SAID_YES

    def test_no_ce_claim_recorded(self):
        outcome = assess_preserving(PRESERVING_INSTANCE, verdict_of("NO - COMPILATION ERROR"))
        assert not outcome.correct
        assert outcome.answer_label == SAID_CE

    def test_reflective_bc_claim_flagged(self):
        verdict = verdict_of(
            "NO - BEHAVIOR CHANGE", junit_test=java_fixtures.REFLECTIVE_TEST
        )
        outcome = assess_preserving(PRESERVING_INSTANCE, verdict)
        assert not outcome.correct
        assert outcome.reflective_test

    def test_parse_failure(self):
        failure = parse_response(raw("garbage"), FULL_SOURCE)
        outcome = assess_preserving(PRESERVING_INSTANCE, failure)
        assert outcome.answer_label == PARSE_ERROR
        assert not outcome.correct

    def test_with_toolchain_validates_evidence(self):
        verdict = verdict_of("NO - BEHAVIOR CHANGE", junit_test=java_fixtures.VACUOUS_TEST)
        outcome = assess_preserving(PRESERVING_INSTANCE, verdict, MockToolchain())
        assert outcome.answer_label == SAID_BC_TEST_NOT_DISCRIMINATING

    def test_rejects_bug_instances(self):
        with pytest.raises(ValueError):
            assess_preserving(CE_INSTANCE, verdict_of("YES"))


class TestInvariants:
    def test_valid_bc_requires_evidence(self):
        with pytest.raises(ValueError):
            AssessmentOutcome(
                instance_id="x",
                attempt_index=1,
                backend_name="m",
                correct=True,
                answer_label=SAID_BC_VALID,
                ground_label="BC",
            )

    def test_correct_answer_label_map(self):
        assert correct_answer_label("BC") == SAID_BC_VALID
        assert correct_answer_label("CE") == SAID_CE
        assert correct_answer_label("PRESERVING") == SAID_YES

    def test_every_verdict_yields_exactly_one_label(self):
        toolchain = MockToolchain()
        verdicts = [
            verdict_of("YES"),
            verdict_of("NO - COMPILATION ERROR"),
            verdict_of("NO - BEHAVIOR CHANGE", junit_test=java_fixtures.VACUOUS_TEST),
            parse_response(raw("junk"), FULL_SOURCE),
        ]
        for inst in (BC_INSTANCE, CE_INSTANCE):
            for verdict in verdicts:
                outcome = assess(inst, verdict, toolchain)
                assert outcome.answer_label in assessor.ANSWER_LABELS


class TestOutcomePersistence:
    def test_round_trip(self, tmp_path):
        outcome = assess(CE_INSTANCE, verdict_of("NO - COMPILATION ERROR"), MockToolchain())
        path = tmp_path / "outcomes.jsonl"
        write_outcomes([outcome], path)
        rows = read_outcomes(path)
        assert len(rows) == 1
        assert rows[0]["schema"] == 1
        assert rows[0]["instance_id"] == CE_INSTANCE.id
        assert rows[0]["correct"] is True
        assert rows[0]["answer_label"] == SAID_CE

    def test_schema_mismatch_rejected(self, tmp_path):
        path = tmp_path / "outcomes.jsonl"
        path.write_text(json.dumps({"schema": 99}) + "\n")
        with pytest.raises(ValueError):
            read_outcomes(path)
