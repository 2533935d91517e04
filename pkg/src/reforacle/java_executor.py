"""Compile source sets and run single JUnit tests in isolated workspaces.

Two toolchains share one surface: RealToolchain shells out to javac/java
with a JUnit 4 runner on the classpath, MockToolchain answers from a
table keyed by content hashes so everything above it can be exercised
without a JDK. Every task gets its own workspace directory; nothing is
shared between tasks.
"""

from __future__ import annotations

import hashlib
import logging
import re
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from . import javalex
from .dataset import SourceSet

logger = logging.getLogger(__name__)

# Test run outcomes
PASS = "PASS"
FAIL = "FAIL"
ERROR = "ERROR"
TIMEOUT = "TIMEOUT"
DID_NOT_COMPILE = "DID_NOT_COMPILE"

REFLECTION_MARKER = "java.lang.reflect"

DEFAULT_TEST_TIMEOUT_S = 30.0


class ToolchainError(RuntimeError):
    pass


class ToolchainUnavailable(ToolchainError):
    pass


class WorkspaceCreationFailed(ToolchainError):
    pass


@dataclass(frozen=True)
class CompileResult:
    success: bool
    diagnostics: str
    elapsed_s: float


@dataclass(frozen=True)
class TestRunResult:
    outcome: str
    runner_output: str
    elapsed_s: float


@dataclass(frozen=True)
class DiscriminationResult:
    on_original: TestRunResult
    on_resulting: TestRunResult
    discriminates: bool
    # which side the test passes on, when it discriminates
    passing_side: str = ""  # "original" | "resulting" | ""


def discrimination(on_original: TestRunResult, on_resulting: TestRunResult) -> DiscriminationResult:
    """Combine two runs; discriminates iff compiled on both and exactly one PASS."""
    compiled = (
        on_original.outcome != DID_NOT_COMPILE
        and on_resulting.outcome != DID_NOT_COMPILE
    )
    passes = [r.outcome == PASS for r in (on_original, on_resulting)]
    disc = compiled and (passes[0] != passes[1])
    side = ""
    if disc:
        side = "original" if passes[0] else "resulting"
    return DiscriminationResult(
        on_original=on_original,
        on_resulting=on_resulting,
        discriminates=disc,
        passing_side=side,
    )


def uses_reflection(test_source: str) -> bool:
    """Lexical check; policy for flagged tests lives in the assessor."""
    return REFLECTION_MARKER in test_source


@dataclass(frozen=True)
class ToolchainConfig:
    javac_path: str = "javac"
    java_path: str = "java"
    junit_classpath: tuple[str, ...] = ()
    test_timeout_s: float = DEFAULT_TEST_TIMEOUT_S
    # JUnit 4 runner by default; point at the platform console launcher
    # (with a vintage engine on the classpath) to run under JUnit 5
    runner_main: str = "org.junit.runner.JUnitCore"


def find_jdk(junit_classpath: tuple[str, ...] = ()) -> ToolchainConfig | None:
    """A usable local JDK, or None."""
    javac = shutil.which("javac")
    java = shutil.which("java")
    if javac is None or java is None:
        return None
    return ToolchainConfig(javac_path=javac, java_path=java, junit_classpath=junit_classpath)


class RealToolchain:
    """javac/java wrapper; one fresh workspace per compile or run."""

    def __init__(self, config: ToolchainConfig, workspace_root: str | Path | None = None) -> None:
        if shutil.which(config.javac_path) is None:
            raise ToolchainUnavailable(f"compiler not found: {config.javac_path}")
        if shutil.which(config.java_path) is None:
            raise ToolchainUnavailable(f"runtime not found: {config.java_path}")
        self.config = config
        self.workspace_root = Path(workspace_root) if workspace_root else None
        self._version: str | None = None

    def version(self) -> str:
        if self._version is None:
            proc = subprocess.run(
                [self.config.javac_path, "-version"],
                capture_output=True,
                text=True,
                timeout=60,
            )
            self._version = (proc.stdout + proc.stderr).strip()
        return self._version

    def _new_workspace(self, tag: str) -> Path:
        try:
            base = self.workspace_root
            if base is not None:
                base.mkdir(parents=True, exist_ok=True)
            return Path(tempfile.mkdtemp(prefix=f"reforacle-{tag}-", dir=base))
        except OSError as err:
            raise WorkspaceCreationFailed(str(err)) from err

    def _write_sources(self, src: SourceSet, workspace: Path) -> list[Path]:
        files = []
        for rel, content in src.files:
            path = workspace / "src" / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(content, encoding="utf-8")
            files.append(path)
        return files

    def compile(self, src: SourceSet, workspace: str | Path | None = None) -> CompileResult:
        """Write all files and compile them together in one javac call."""
        if not src.files:
            raise WorkspaceCreationFailed("empty source set")
        ws = Path(workspace) if workspace else self._new_workspace("compile")
        files = self._write_sources(src, ws)
        out = ws / "classes"
        out.mkdir(exist_ok=True)
        cmd = [self.config.javac_path, "-d", str(out)]
        if self.config.junit_classpath:
            cmd += ["-cp", _join_cp(self.config.junit_classpath)]
        cmd += [str(f) for f in files]
        start = time.monotonic()
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=300)
        elapsed = time.monotonic() - start
        diagnostics = proc.stdout + proc.stderr
        _log_invocation(ws, cmd, diagnostics)
        return CompileResult(success=proc.returncode == 0, diagnostics=diagnostics, elapsed_s=elapsed)

    def run_test(
        self,
        program: SourceSet,
        test_source: str,
        workspace: str | Path | None = None,
    ) -> TestRunResult:
        """Compile program + test together, then run the single JUnit test."""
        test_class = javalex.top_level_public_class(test_source)
        if test_class is None:
            raise ToolchainError("test must declare exactly one public class")
        ws = Path(workspace) if workspace else self._new_workspace("test")
        test_rel = _test_relative_path(test_source, test_class)
        combined = SourceSet(files=program.files + ((test_rel, test_source),))
        compile_result = self.compile(combined, ws)
        if not compile_result.success:
            return TestRunResult(
                outcome=DID_NOT_COMPILE,
                runner_output=compile_result.diagnostics,
                elapsed_s=compile_result.elapsed_s,
            )
        classpath = _join_cp((str(ws / "classes"),) + self.config.junit_classpath)
        qualified = _qualified_test_class(test_source, test_class)
        runner = self.config.runner_main
        if "ConsoleLauncher" in runner or "console" in runner:
            runner_args = ["--select-class", qualified, "--disable-ansi-colors"]
        else:
            runner_args = [qualified]
        cmd = [self.config.java_path, "-cp", classpath, runner] + runner_args
        start = time.monotonic()
        try:
            proc = subprocess.run(
                cmd, capture_output=True, text=True, timeout=self.config.test_timeout_s
            )
        except subprocess.TimeoutExpired as err:
            _log_invocation(ws, cmd, "TIMEOUT")
            return TestRunResult(
                outcome=TIMEOUT,
                runner_output=str(err),
                elapsed_s=time.monotonic() - start,
            )
        elapsed = time.monotonic() - start
        output = proc.stdout + proc.stderr
        _log_invocation(ws, cmd, output)
        if proc.returncode == 0:
            outcome = PASS
        elif _FAILURE_MARKER.search(output):
            outcome = FAIL
        else:
            outcome = ERROR
        return TestRunResult(outcome=outcome, runner_output=output, elapsed_s=elapsed)

    def check_discriminating(
        self, test_source: str, original: SourceSet, resulting: SourceSet
    ) -> DiscriminationResult:
        """Run the same test against both versions in disjoint workspaces."""
        on_original = self.run_test(original, test_source)
        on_resulting = self.run_test(resulting, test_source)
        return discrimination(on_original, on_resulting)


class MockToolchain:
    """Scripted toolchain: content-hash tables for compiles and runs.

    Unscripted programs compile successfully and unscripted tests pass,
    so the default world is a healthy one; tests script the failures
    they need.
    """

    def __init__(
        self,
        default_compile_success: bool = True,
        default_run_outcome: str = PASS,
    ) -> None:
        self._compile_table: dict[str, CompileResult] = {}
        self._run_table: dict[tuple[str, str], TestRunResult] = {}
        self.default_compile_success = default_compile_success
        self.default_run_outcome = default_run_outcome

    def version(self) -> str:
        return "mock-toolchain"

    def script_compile(self, src: SourceSet, success: bool, diagnostics: str = "") -> None:
        self._compile_table[source_set_hash(src)] = CompileResult(
            success=success, diagnostics=diagnostics, elapsed_s=0.0
        )

    def script_run(
        self,
        program: SourceSet,
        test_source: str,
        outcome: str,
        runner_output: str = "",
    ) -> None:
        key = (source_set_hash(program), _text_hash(test_source))
        self._run_table[key] = TestRunResult(
            outcome=outcome, runner_output=runner_output, elapsed_s=0.0
        )

    def compile(self, src: SourceSet, workspace: str | Path | None = None) -> CompileResult:
        if not src.files:
            raise WorkspaceCreationFailed("empty source set")
        key = source_set_hash(src)
        if key in self._compile_table:
            return self._compile_table[key]
        return CompileResult(
            success=self.default_compile_success,
            diagnostics="" if self.default_compile_success else "scripted failure",
            elapsed_s=0.0,
        )

    def run_test(
        self,
        program: SourceSet,
        test_source: str,
        workspace: str | Path | None = None,
    ) -> TestRunResult:
        compile_result = self.compile(program)
        if not compile_result.success:
            return TestRunResult(
                outcome=DID_NOT_COMPILE,
                runner_output=compile_result.diagnostics,
                elapsed_s=0.0,
            )
        key = (source_set_hash(program), _text_hash(test_source))
        if key in self._run_table:
            return self._run_table[key]
        return TestRunResult(outcome=self.default_run_outcome, runner_output="", elapsed_s=0.0)

    def check_discriminating(
        self, test_source: str, original: SourceSet, resulting: SourceSet
    ) -> DiscriminationResult:
        return discrimination(
            self.run_test(original, test_source),
            self.run_test(resulting, test_source),
        )


def source_set_hash(src: SourceSet) -> str:
    h = hashlib.sha256()
    for path, content in sorted(src.files):
        h.update(path.encode("utf-8"))
        h.update(b"\x00")
        h.update(content.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


def _text_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# failure summaries of the JUnit 4 runner and the platform console launcher
_FAILURE_MARKER = re.compile(r"FAILURES!!!|\b[1-9]\d* tests? failed")

_PACKAGE_RE = re.compile(r"^\s*package\s+([\w.]+)\s*;", re.MULTILINE)


def _test_relative_path(test_source: str, test_class: str) -> str:
    match = _PACKAGE_RE.search(test_source)
    if match:
        return match.group(1).replace(".", "/") + f"/{test_class}.java"
    return f"{test_class}.java"


def _qualified_test_class(test_source: str, test_class: str) -> str:
    match = _PACKAGE_RE.search(test_source)
    if match:
        return f"{match.group(1)}.{test_class}"
    return test_class


def _join_cp(entries: tuple[str, ...]) -> str:
    import os

    return os.pathsep.join(entries)


def _log_invocation(workspace: Path, cmd: list[str], output: str) -> None:
    """Verbatim record of every external invocation, per workspace."""
    try:
        log = workspace / "invocations.log"
        with log.open("a", encoding="utf-8") as fh:
            fh.write(" ".join(cmd) + "\n")
            fh.write(output)
            fh.write("\n---\n")
    except OSError:  # logging must never fail the run
        logger.debug("could not write invocation log in %s", workspace)
