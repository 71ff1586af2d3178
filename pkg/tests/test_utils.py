import math
from pathlib import Path

import numpy as np
import pytest

from dirreg.exceptions import InstanceError
from dirreg.models.results import Status
from dirreg.services.utils.csv_reader import read_points
from dirreg.services.utils.csv_writer import format_cell
from dirreg.services.utils.file_storage import save_text_atomically
from dirreg.services.utils.hashing import instance_digest, seed_from_digest
from dirreg.services.utils.limiter import check_instance_file
from dirreg.services.utils.sampling import box_grid, cap_directions, geometric_values, unique_rows


@pytest.mark.parametrize(
    "value, text",
    [
        (None, ""),
        (True, "true"),
        (0.1, "0.1"),
        (-0.0, "0"),
        (math.inf, "inf"),
        (-math.inf, "-inf"),
        ([1.0, 2.5], "1 2.5"),
        (Status.fails, "fails"),
        (3, "3"),
    ],
)
def test_format_cell(value: object, text: str) -> None:
    assert format_cell(value) == text


def test_read_points_errors(tmp_path: Path) -> None:
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("x,y\n0,0\n1\n", encoding="utf-8")
    with pytest.raises(InstanceError, match="line 3: expected 2 columns"):
        read_points(ragged, 2)

    words = tmp_path / "words.csv"
    words.write_text("x,y\n0,zero\n", encoding="utf-8")
    with pytest.raises(InstanceError, match="non-numeric"):
        read_points(words, 2)

    empty = tmp_path / "empty.csv"
    empty.write_text("x,y\n", encoding="utf-8")
    assert read_points(empty, 2).shape == (0, 2)


def test_save_text_atomically(tmp_path: Path) -> None:
    target = tmp_path / "reports" / "out.csv"
    save_text_atomically("a\n", target)
    save_text_atomically("b\n", target)
    assert target.read_text() == "b\n"
    assert [p.name for p in target.parent.iterdir()] == ["out.csv"]


def test_check_instance_file(tmp_path: Path) -> None:
    good = tmp_path / "ok.yml"
    good.write_text("schema: 1\n", encoding="utf-8")
    assert check_instance_file(good) == b"schema: 1\n"

    with pytest.raises(InstanceError, match="extension"):
        check_instance_file(tmp_path / "ok.json")
    with pytest.raises(InstanceError, match="no such file"):
        check_instance_file(tmp_path / "missing.yaml")

    binary = tmp_path / "binary.yaml"
    binary.write_bytes(b"\xff\xfe\x00")
    with pytest.raises(InstanceError, match="UTF-8"):
        check_instance_file(binary)


def test_seed_from_digest() -> None:
    digest = instance_digest(b"schema: 1\n")
    assert len(digest) == 64
    assert seed_from_digest(digest) == int(digest[:8], 16)
    assert seed_from_digest(digest) == seed_from_digest(instance_digest(b"schema: 1\n"))


def test_box_grid_respects_blocks() -> None:
    points = box_grid(np.zeros(2), np.array([1.0, 2.0]), 5, blocks=[1, 1])
    assert points.shape == (25, 2)
    disc = box_grid(np.zeros(2), 1.0, 5)
    assert np.all(np.linalg.norm(disc, axis=1) <= 1.0 + 1e-12)
    assert disc.shape[0] == 13


def test_box_grid_switches_to_halton() -> None:
    points = box_grid(np.zeros(3), 1.0, 10, max_points=50, seed=1)
    again = box_grid(np.zeros(3), 1.0, 10, max_points=50, seed=1)
    np.testing.assert_array_equal(points, again)
    assert 1 < points.shape[0] <= 51


def test_cap_directions_are_unit_and_inside() -> None:
    generators = np.array([[1.0, 0.0], [0.0, 1.0]])
    directions = cap_directions(generators, 9)
    np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0)
    assert np.all(directions >= -1e-12)
    assert directions.shape[0] >= 3


def test_unique_rows_folds_negative_zero() -> None:
    rows = unique_rows(np.array([[0.0, 1.0], [-0.0, 1.0], [-1.0, 0.0]]))
    np.testing.assert_array_equal(rows, [[-1.0, 0.0], [0.0, 1.0]])
    assert geometric_values(1.0, 0.5, 3) == [1.0, 0.5, 0.25]
