"""One-line verdicts of the acceptance criteria, printed at the end of the run."""

LINES: list[str] = []


def record(number: int, passed: bool, detail: str) -> bool:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    LINES.append(line)
    print(line)
    return passed
