import pytest

from ctexpand import pipeline


@pytest.fixture(scope="session")
def su4_run():
    """Full image and det-1 slice at (n, q, s) = (2, 2, 1), no cache."""
    out = {}
    for group in ("full", "det1"):
        cfg = pipeline.RunConfig(n=2, q=2, s=1, group=group, cache=False)
        spec, table, graph, imgs = pipeline.get_graph(cfg)
        out[group] = (cfg, spec, table, graph, imgs)
    return out


_CRITERIA: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    name = item.name
    if not name.startswith("test_criterion_"):
        return
    num = int(name.split("_")[2])
    detail = dict(item.user_properties).get("detail", "")
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _CRITERIA[num] = ("PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        status, detail = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d}: {status}  {detail}")
