import pytest  # type: ignore

from pacstate.settings import (
    THREADS_VARIABLE,
    get_env_or_default,
    thread_count,
)


def test_get_env_or_default(monkeypatch):
    monkeypatch.delenv("PACSTATE_UNSET", raising=False)
    assert get_env_or_default("PACSTATE_UNSET", "fallback") == "fallback"
    monkeypatch.setenv("PACSTATE_UNSET", "value")
    assert get_env_or_default("PACSTATE_UNSET", "fallback") == "value"


def test_thread_count(monkeypatch):
    monkeypatch.setenv(THREADS_VARIABLE, "3")
    assert thread_count() == 3
    monkeypatch.delenv(THREADS_VARIABLE)
    assert thread_count() >= 1


@pytest.mark.parametrize("value", ["many", "0", "-2"])
def test_thread_count_rejects(monkeypatch, value: str):
    monkeypatch.setenv(THREADS_VARIABLE, value)
    with pytest.raises(EnvironmentError):
        thread_count()
