"""Prints a one-line verdict per acceptance criterion after the test run."""

import re

_CRITERION = re.compile(r"test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts = {}
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            match = _CRITERION.search(nodeid)
            if match is None:
                continue
            number = int(match.group(1))
            name = nodeid.split("::")[-1]
            word = "PASS" if outcome == "passed" else "FAIL"
            # a criterion that both passed and failed phases reports FAIL
            if verdicts.get(number, ("PASS", ""))[0] != "FAIL":
                verdicts[number] = (word, name)
    if not verdicts:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(verdicts):
        word, name = verdicts[number]
        terminalreporter.write_line(f"criterion {number:2d}: {word}  ({name})")
