import pytest
from hypothesis import settings

settings.register_profile("fptkit", deadline=None, max_examples=60)
settings.load_profile("fptkit")


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("FPT_CACHE_DIR", str(tmp_path / "cache"))


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[n][1])
