import os

from dotenv import dotenv_values

config = {
    **dotenv_values(".env"),
    **os.environ,
}

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

# numeric defaults shared by the services
MEMBERSHIP_TOL = 1e-9
BOUNDARY_SLACK = 1e-9
# open target balls are sampled up to this relative distance from their rim
BOUNDARY_OFFSET = 1e-6
UNIT_TOL = 1e-12
BISECTION_TOL = 0.05
GRID_DENSITY = 21
T_RATIO = 0.5
T_COUNT = 6
SHRINK_RETRIES = 4
MAX_GRID_POINTS = 400
VARIATION_SCALE_START = 0.25
VARIATION_SCALE_RATIO = 0.5
VARIATION_SCALE_COUNT = 8
MAX_ITERATIONS = 200


def check_config() -> None:
    threads = config.get("DIRREG_THREADS")
    if threads is not None:
        if not threads.isdigit() or int(threads) < 1:
            raise ValueError(f"DIRREG_THREADS must be a positive integer, got {threads!r}")

    level = config.get("DIRREG_LOG_LEVEL")
    if level is not None and level.upper() not in LOG_LEVELS:
        raise ValueError(f"DIRREG_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}")


def thread_count() -> int:
    threads = config.get("DIRREG_THREADS")
    if threads is None or not threads.isdigit():
        return 1
    return max(1, int(threads))


def log_level() -> str:
    return (config.get("DIRREG_LOG_LEVEL") or "WARNING").upper()
