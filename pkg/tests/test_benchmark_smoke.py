import importlib.util
import json
from pathlib import Path

BENCH = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_backends.py"


def test_benchmark_runs(capsys):
    loader = importlib.util.spec_from_file_location("bench_backends", BENCH)
    mod = importlib.util.module_from_spec(loader)
    loader.loader.exec_module(mod)
    assert mod.main(["--repeat", "2", "--steps", "10", "--json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert {r["case"] for r in rows} >= {"accel reduced", "accel equator", "propagate square 10 steps"}
    assert all(r["best_s"] > 0 for r in rows)
