import pytest

from uavcpn.units import ScenarioConfig



def assert_configs_close(a, b, rel=1e-12):
    for name in a.__dataclass_fields__:
        x, y = getattr(a, name), getattr(b, name)
        if isinstance(x, float):
            assert y == pytest.approx(x, rel=rel), name
        elif name != "compute_model":
            assert x == y, name
    assert type(a.compute_model) is type(b.compute_model)
    assert a.compute_model.mean() == pytest.approx(b.compute_model.mean(), rel=rel)


@pytest.fixture
def default_cfg():
    return ScenarioConfig()


_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def report():
    """Record one acceptance line; the assertion stays with the caller."""
    def _report(criterion: str, ok: bool, detail: str):
        _ACCEPTANCE.append((criterion, bool(ok), detail))
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}")
