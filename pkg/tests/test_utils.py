import json

import numpy as np
import pandas as pd

from jamming_game.analysis import PureStrategyProfile
from jamming_game.utils import (
    chunk_bounds,
    convert_to_dict,
    default_block_size,
    default_workers,
    dumps_csv,
    dumps_json,
    progress_enabled,
    write_output,
)


def test_dumps_json_uses_17_digits():
    text = dumps_json({"x": 0.1, "n": 3, "ok": True, "v": [1.0, 2.5]})
    assert '"x": 0.10000000000000001' in text
    assert '"v": [1.0, 2.5]' in text
    assert json.loads(text) == {"x": 0.1, "n": 3, "ok": True, "v": [1.0, 2.5]}


def test_dumps_json_models_and_arrays():
    report = {"profile": PureStrategyProfile.of(1.0, [0.0, -0.5]), "grid": np.array([0.25, 0.5])}
    assert json.loads(dumps_json(report)) == {"profile": {"threshold": 1.0, "w": [0.0, -0.5]}, "grid": [0.25, 0.5]}
    assert convert_to_dict(np.float64(2.0)) == 2.0


def test_dumps_csv():
    text = dumps_csv(pd.DataFrame({"lambda": [0.1], "pe": [0.5]}))
    assert text == "lambda,pe\n0.10000000000000001,0.5\n"


def test_chunk_bounds():
    assert chunk_bounds(10, 3) == [(0, 3), (3, 6), (6, 10)]
    assert chunk_bounds(2, 8) == [(0, 1), (1, 2)]
    assert chunk_bounds(0, 4) == [(0, 0)]


def test_environment_defaults(monkeypatch):
    monkeypatch.delenv("JAMMING_GAME_WORKERS", raising=False)
    monkeypatch.delenv("JAMMING_GAME_BLOCK_SIZE", raising=False)
    monkeypatch.delenv("JAMMING_GAME_PROGRESS", raising=False)
    assert default_workers() == 1
    assert default_block_size() == 65536
    assert not progress_enabled()
    monkeypatch.setenv("JAMMING_GAME_WORKERS", "4")
    monkeypatch.setenv("JAMMING_GAME_PROGRESS", "true")
    assert default_workers() == 4
    assert progress_enabled()


def test_write_output(tmp_path, capsys):
    write_output("hello")
    assert capsys.readouterr().out == "hello\n"
    path = tmp_path / "out.txt"
    write_output("a\n", str(path))
    assert path.read_text() == "a\n"
