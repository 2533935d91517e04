"""Per-attempt correctness decisions against ground truth.

A verdict is only as good as its evidence: a behavior-change claim
counts as correct solely when the model's own JUnit test compiles
against both program versions and passes on exactly one of them. The
answer taxonomy distinguishes wrong verdicts from right verdicts with
failed evidence, so error analyses can separate the two.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from . import java_executor, verdict_parser
from .dataset import BugInstance
from .java_executor import DiscriminationResult
from .verdict_parser import ModelVerdict, ParseFailure

logger = logging.getLogger(__name__)

OUTCOME_SCHEMA = 1

# Answer labels
SAID_YES = "SAID_YES"
SAID_CE = "SAID_CE"
SAID_BC_VALID = "SAID_BC_VALID"
SAID_BC_TEST_NOT_COMPILING = "SAID_BC_TEST_NOT_COMPILING"
SAID_BC_TEST_NOT_DISCRIMINATING = "SAID_BC_TEST_NOT_DISCRIMINATING"
SAID_UNKNOWN = "SAID_UNKNOWN"
PARSE_ERROR = "PARSE_ERROR"

ANSWER_LABELS = (
    SAID_YES,
    SAID_CE,
    SAID_BC_VALID,
    SAID_BC_TEST_NOT_COMPILING,
    SAID_BC_TEST_NOT_DISCRIMINATING,
    SAID_UNKNOWN,
    PARSE_ERROR,
)


def correct_answer_label(ground_label: str) -> str:
    """The single answer label that scores correct for a ground truth."""
    return {"BC": SAID_BC_VALID, "CE": SAID_CE, "PRESERVING": SAID_YES}[ground_label]


@dataclass(frozen=True)
class AssessmentOutcome:
    instance_id: str
    attempt_index: int
    backend_name: str
    correct: bool
    answer_label: str
    ground_label: str
    variant_tag: str = ""
    evidence: DiscriminationResult | None = None
    reflective_test: bool = False
    inconclusive: bool = False
    parse_reason: str | None = None
    explanation: str = ""
    latency_s: float = 0.0
    tokens_in: int | None = None
    tokens_out: int | None = None
    tokens_reasoning: int | None = None
    cost_estimate: float | None = None
    # provenance, filled by the pipeline
    prompt_hash: str = ""
    template_version: str = ""
    toolchain_version: str = ""
    seed: int | None = None
    temperature: str = ""
    refactoring_type: str = ""
    tool: str = ""

    def __post_init__(self) -> None:
        if self.answer_label not in ANSWER_LABELS:
            raise ValueError(f"unknown answer label {self.answer_label!r}")
        if self.answer_label == SAID_BC_VALID and not self.inconclusive:
            if self.evidence is None or not self.evidence.discriminates:
                raise ValueError("SAID_BC_VALID requires discriminating evidence")

    def to_json_line(self) -> str:
        doc = {
            "schema": OUTCOME_SCHEMA,
            "instance_id": self.instance_id,
            "attempt_index": self.attempt_index,
            "backend_name": self.backend_name,
            "variant_tag": self.variant_tag,
            "correct": self.correct,
            "answer_label": self.answer_label,
            "ground_label": self.ground_label,
            "reflective_test": self.reflective_test,
            "inconclusive": self.inconclusive,
            "parse_reason": self.parse_reason,
            "explanation": self.explanation,
            "latency_s": self.latency_s,
            "tokens_in": self.tokens_in,
            "tokens_out": self.tokens_out,
            "tokens_reasoning": self.tokens_reasoning,
            "cost_estimate": self.cost_estimate,
            "prompt_hash": self.prompt_hash,
            "template_version": self.template_version,
            "toolchain_version": self.toolchain_version,
            "seed": self.seed,
            "temperature": self.temperature,
            "refactoring_type": self.refactoring_type,
            "tool": self.tool,
        }
        if self.evidence is not None:
            doc["evidence"] = {
                "discriminates": self.evidence.discriminates,
                "passing_side": self.evidence.passing_side,
                "on_original": self.evidence.on_original.outcome,
                "on_resulting": self.evidence.on_resulting.outcome,
            }
        return json.dumps(doc, sort_keys=True)


def _telemetry(verdict: ModelVerdict | ParseFailure) -> dict:
    raw = verdict.raw
    if raw is None:
        return {}
    return {
        "latency_s": raw.latency_s,
        "tokens_in": raw.tokens_in,
        "tokens_out": raw.tokens_out,
        "tokens_reasoning": raw.tokens_reasoning,
        "cost_estimate": raw.cost_estimate,
    }


def _base(inst: BugInstance, verdict, attempt_index: int, backend_name: str,
          variant_tag: str) -> dict:
    raw = verdict.raw
    return {
        "instance_id": inst.id,
        "attempt_index": raw.attempt_index if raw is not None else attempt_index,
        "backend_name": raw.backend_name if raw is not None else backend_name,
        "variant_tag": variant_tag,
        "ground_label": inst.label,
        "refactoring_type": inst.refactoring_type,
        "tool": inst.tool,
        **_telemetry(verdict),
    }


def assess(
    inst: BugInstance,
    verdict: ModelVerdict | ParseFailure,
    toolchain,
    *,
    attempt_index: int = 1,
    backend_name: str = "",
    variant_tag: str = "",
) -> AssessmentOutcome:
    """Judge one attempt on a bug instance (ground truth BC or CE).

    A YES is always incorrect here: every instance is a confirmed bug.
    Behavior-change claims are validated mechanically through the model's
    own test; toolchain failures mark the outcome inconclusive rather
    than wrong.
    """
    if inst.label not in ("BC", "CE"):
        raise ValueError(f"assess() expects a bug instance, got label {inst.label}")
    base = _base(inst, verdict, attempt_index, backend_name, variant_tag)

    if isinstance(verdict, ParseFailure):
        return AssessmentOutcome(
            correct=False, answer_label=PARSE_ERROR, parse_reason=verdict.reason, **base
        )

    base["explanation"] = verdict.explanation
    if verdict.category == verdict_parser.YES:
        return AssessmentOutcome(correct=False, answer_label=SAID_YES, **base)
    if verdict.category == verdict_parser.UNKNOWN:
        return AssessmentOutcome(correct=False, answer_label=SAID_UNKNOWN, **base)
    if verdict.category == verdict_parser.NO_COMPILATION_ERROR:
        return AssessmentOutcome(
            correct=inst.label == "CE", answer_label=SAID_CE, **base
        )

    # NO - BEHAVIOR CHANGE: validate the claimed evidence.
    label, evidence, reflective, inconclusive = _validate_bc_claim(inst, verdict, toolchain)
    correct = inst.label == "BC" and label == SAID_BC_VALID and not inconclusive
    return AssessmentOutcome(
        correct=correct,
        answer_label=label,
        evidence=evidence,
        reflective_test=reflective,
        inconclusive=inconclusive,
        **base,
    )


def _validate_bc_claim(
    inst: BugInstance, verdict: ModelVerdict, toolchain
) -> tuple[str, DiscriminationResult | None, bool, bool]:
    """(answer_label, evidence, reflective, inconclusive) for a BC claim."""
    try:
        test_source = verdict_parser.extract_test_source(verdict)
    except verdict_parser.MalformedTest:
        return SAID_BC_TEST_NOT_COMPILING, None, False, False
    if test_source is None:
        # schema violation (missing junit_test) counts as absent evidence
        return SAID_BC_TEST_NOT_COMPILING, None, False, False
    reflective = java_executor.uses_reflection(test_source)
    try:
        evidence = toolchain.check_discriminating(test_source, inst.original, inst.resulting)
    except java_executor.ToolchainError as err:
        logger.warning("inconclusive assessment for %s: %s", inst.id, err)
        return SAID_BC_TEST_NOT_COMPILING, None, reflective, True
    if (
        evidence.on_original.outcome == java_executor.DID_NOT_COMPILE
        or evidence.on_resulting.outcome == java_executor.DID_NOT_COMPILE
    ):
        return SAID_BC_TEST_NOT_COMPILING, evidence, reflective, False
    if reflective:
        # reflective tests step outside the client-observable equivalence
        # notion; their evidence never counts as discriminating
        return SAID_BC_TEST_NOT_DISCRIMINATING, evidence, True, False
    if evidence.discriminates:
        return SAID_BC_VALID, evidence, False, False
    return SAID_BC_TEST_NOT_DISCRIMINATING, evidence, False, False


def assess_preserving(
    inst: BugInstance,
    verdict: ModelVerdict | ParseFailure,
    toolchain=None,
    *,
    attempt_index: int = 1,
    backend_name: str = "",
    variant_tag: str = "",
) -> AssessmentOutcome:
    """Judge one attempt on a behavior-preserving instance.

    Correct iff the model answers YES. NO verdicts are recorded with
    their claimed category for false-positive analysis; when a toolchain
    is available the claimed test evidence is validated too, and
    reflective tests are flagged.
    """
    if inst.label != "PRESERVING":
        raise ValueError(f"assess_preserving() expects PRESERVING, got {inst.label}")
    base = _base(inst, verdict, attempt_index, backend_name, variant_tag)

    if isinstance(verdict, ParseFailure):
        return AssessmentOutcome(
            correct=False, answer_label=PARSE_ERROR, parse_reason=verdict.reason, **base
        )

    base["explanation"] = verdict.explanation
    if verdict.category == verdict_parser.YES:
        return AssessmentOutcome(correct=True, answer_label=SAID_YES, **base)
    if verdict.category == verdict_parser.UNKNOWN:
        return AssessmentOutcome(correct=False, answer_label=SAID_UNKNOWN, **base)
    if verdict.category == verdict_parser.NO_COMPILATION_ERROR:
        return AssessmentOutcome(correct=False, answer_label=SAID_CE, **base)

    # NO - BEHAVIOR CHANGE on a preserving instance is a false positive.
    reflective = verdict.junit_test is not None and java_executor.uses_reflection(
        verdict.junit_test
    )
    if toolchain is None:
        # without an executor the claim stays unvalidated: on a confirmed
        # behavior-preserving pair a non-reflective test cannot truly
        # discriminate, so the claim is recorded as unsupported
        label = (
            SAID_BC_TEST_NOT_COMPILING
            if verdict.junit_test is None
            else SAID_BC_TEST_NOT_DISCRIMINATING
        )
        return AssessmentOutcome(
            correct=False, answer_label=label, reflective_test=reflective, **base
        )
    label, evidence, reflective, inconclusive = _validate_bc_claim(inst, verdict, toolchain)
    return AssessmentOutcome(
        correct=False,
        answer_label=label,
        evidence=evidence,
        reflective_test=reflective,
        inconclusive=inconclusive,
        **base,
    )


def write_outcomes(outcomes, path: str | Path) -> None:
    """Append outcomes to a JSON-lines results file."""
    path = Path(path)
    with path.open("a", encoding="utf-8") as fh:
        for outcome in outcomes:
            fh.write(outcome.to_json_line() + "\n")


def read_outcomes(path: str | Path) -> list[dict]:
    """Outcome records as dicts; raises on schema mismatch."""
    rows = []
    with Path(path).open(encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            if doc.get("schema") != OUTCOME_SCHEMA:
                raise ValueError(f"{path}:{n}: unsupported outcome schema {doc.get('schema')}")
            rows.append(doc)
    return rows
