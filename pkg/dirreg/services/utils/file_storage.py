import os
import tempfile
from pathlib import Path


def save_text_atomically(text: str, file_path: str | Path) -> None:
    """Write through a temporary file in the same directory, then rename over the target."""
    target = Path(file_path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(temp_name, target)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise
