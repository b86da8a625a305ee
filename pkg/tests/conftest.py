import pytest

from hcsp.evaluation import Route, Solution
from hcsp.instance import Caregiver, Instance, Service

# One caregiver, one day, six one-hour services without travel.  Hard and
# soft windows are chosen so that the initial schedule below has cost 570,
# penalization 30, and chain bounds t^e = (0, 120, 180, 240, 450, 540),
# t^l = (180, 270, 450, 600, 720, 780).
EXAMPLE_WINDOWS = [
    ((0, 240), (120, 240)),
    ((120, 330), (210, 330)),
    ((120, 510), (300, 510)),
    ((200, 660), (240, 600)),
    ((450, 800), (450, 630)),
    ((540, 840), (540, 720)),
]
EXAMPLE_STARTS = (90, 210, 300, 390, 510, 600)


def example_instance() -> Instance:
    services = tuple(Service(id=k + 1, duration=60, day=1, hard_window=hw, soft_window=sw, user_id=k + 1)
                     for k, (hw, sw) in enumerate(EXAMPLE_WINDOWS))
    cg = Caregiver(id=1, availability={1: (0, 900)}, daily_max={1: 600}, weekly_agreed=2400,
                   affinity={j: 0 for j in range(1, 7)})
    travel = tuple(tuple(0 for _ in range(6)) for _ in range(6))
    return Instance(services=services, caregivers=(cg,), travel=travel, pi_min=120)


def example_solution() -> Solution:
    inst = example_instance()
    return Solution(inst, [Route(1, 1, (1, 2, 3, 4, 5, 6), EXAMPLE_STARTS)])


@pytest.fixture
def example():
    return example_solution()


# acceptance bookkeeping: each criterion may be checked by several tests
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


def record(criterion: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[k]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"CRITERION {k}: {status} - {detail}")
