from pathlib import Path

from dirreg.exceptions import InstanceError

MAX_FILE_SIZE = 1 * 1024 * 1024  # 1MB
INSTANCE_SUFFIXES = (".yaml", ".yml")


def check_instance_file(file_path: str | Path) -> bytes:
    """Read an instance file after checking its extension, size and encoding."""
    path = Path(file_path)
    if path.suffix.lower() not in INSTANCE_SUFFIXES:
        raise InstanceError(f"{path}: instance files must have a .yaml or .yml extension")
    if not path.is_file():
        raise InstanceError(f"{path}: no such file")

    size = path.stat().st_size
    if size > MAX_FILE_SIZE:
        raise InstanceError(f"{path}: file too large. Maximum size is {MAX_FILE_SIZE / 1024 / 1024:.2f} MB.")

    content = path.read_bytes()
    try:
        content.decode("utf-8")
    except UnicodeDecodeError:
        raise InstanceError(f"{path}: instance files must be UTF-8 text")
    return content
