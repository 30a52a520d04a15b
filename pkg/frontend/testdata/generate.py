#!/usr/bin/env python3
"""Regenerate the golden CSV fixtures from the pqrc package.

Small deterministic runs (fixed readout, finite shots, a few replicas)
covering every CSV schema the renderer consumes. Run from this directory:

    python3 generate.py
"""

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

HERE = Path(__file__).resolve().parent


def run(config: dict, command: list[str], outputs: dict[str, str]) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        config_path = Path(tmp) / "config.json"
        config_path.write_text(json.dumps(config))
        outdir = Path(tmp) / "out"
        argv = [sys.executable, "-m", "pqrc.cli", *command, str(config_path),
                "--output-dir", str(outdir)]
        subprocess.run(argv, check=True, capture_output=True)
        for produced, target in outputs.items():
            shutil.copy(outdir / produced, HERE / target)
            print(f"wrote {target}")


def base(task, photon_v, n_shot=2000, replicas=4, **kwargs):
    config = {
        "task": task,
        "photon": {"n_ph": 2, "visibility": photon_v},
        "reservoir": {"a_in": 1.2, "a_fb_d": 0.9, "a_fb_4": -0.7,
                      "mu_prime": 3, "mu_dprime": 8, "n_shot": n_shot,
                      "seed": 11},
        "split": {"train_fraction": 0.8},
        "readout": {"alpha": 1e-8, "washout": 5},
        "replicas": replicas,
    }
    config.update(kwargs)
    return config


def main() -> None:
    for v, tag in ((1.0, "V1"), (0.0, "V0")):
        run(base({"kind": "memory", "K": 60, "seed": 1, "d": 3}, v),
            ["characterize", "memory"], {"sweep.csv": f"memory_{tag}.csv"})
        run(base({"kind": "monomial", "K": 40, "n": 3}, v),
            ["characterize", "expressivity", "--grid", "2,3,4,5,6"],
            {"sweep.csv": f"mono_{tag}.csv"})
        run(base({"kind": "polynomial", "K": 40, "N": 2}, v),
            ["characterize", "expressivity", "--grid", "1,2,3,4"],
            {"sweep.csv": f"poly_{tag}.csv"})
        run(base({"kind": "xor", "K": 60, "seed": 2, "d": 1}, v),
            ["characterize", "expressivity", "--grid", "1,2,3"],
            {"sweep.csv": f"xor_{tag}.csv"})
        run(base({"kind": "narma", "K": 80, "seed": 3, "N": 2}, v),
            ["characterize", "expressivity", "--grid", "1,2,3"],
            {"sweep.csv": f"narma_{tag}.csv"})
        run(base({"kind": "mackey_glass", "K": 60, "t_f": 3}, v,
                 split={"train_fraction": 0.5}),
            ["run"], {"predictions.csv": f"mg_pred_{tag}.csv"})
        run(base({"kind": "narma", "K": 80, "seed": 3, "N": 2}, v),
            ["run"], {"predictions.csv": f"narma_pred_{tag}.csv"})

    run(base({"kind": "mackey_glass", "K": 60, "t_f": 1}, 1.0,
             split={"train_fraction": 0.5}),
        ["characterize", "expressivity", "--grid", "0,1,2,3"],
        {"sweep.csv": "mg_tf_V1.csv"})
    run(base({"kind": "monomial", "K": 40, "n": 3}, 1.0),
        ["characterize", "counts_sweep", "--grid", "100,1000,inf"],
        {"sweep.csv": "counts.csv"})
    run(base({"kind": "polynomial", "K": 40, "N": 3}, 1.0),
        ["run"], {"predictions.csv": "poly_pred_V1.csv"})
    run(base({"kind": "xor", "K": 60, "seed": 2, "d": 1}, 1.0),
        ["run"], {"predictions.csv": "xor_pred_V1.csv"})
    run(base({"kind": "narma", "K": 80, "seed": 3, "N": 2}, 1.0,
             split={"train_fraction": 0.8, "shuffle": True, "shuffle_seed": 4}),
        ["run"], {"predictions.csv": "narma_shuffled_pred_V1.csv"})

    # header-only file for the degenerate-input contract
    (HERE / "empty_sweep.csv").write_text(
        "sweep_variable,value,metric,replica,result\n"
    )
    print("wrote empty_sweep.csv")


if __name__ == "__main__":
    main()
