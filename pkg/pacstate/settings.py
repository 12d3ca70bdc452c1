import os

THREADS_VARIABLE = "PACSTATE_THREADS"


def get_env_or_default(variable_name: str, default: str) -> str:
    if (var := os.environ.get(variable_name)) is None:
        return default
    return var


def thread_count() -> int:
    value = get_env_or_default(THREADS_VARIABLE, str(os.cpu_count() or 1))
    try:
        threads = int(value)
    except ValueError:
        raise EnvironmentError(
            f"{THREADS_VARIABLE} must be an integer, got {value!r}"
        )
    if threads < 1:
        raise EnvironmentError(
            f"{THREADS_VARIABLE} must be a positive integer, got {threads}"
        )
    return threads
