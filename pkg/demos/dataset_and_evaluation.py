# A small dataset, a stand-in predictor, and the evaluation report.
#
# Real benchmarking would score a trained surrogate; here a "noisy oracle"
# (truth plus Gaussian noise) gives predictions whose error levels are known
# in closed form, which makes it a check on the evaluation code itself.

import tempfile
from pathlib import Path

import numpy as np

from hsld import assemble_dataset, evaluate_dataset, noisy_oracle_predict, render_heatmap
from hsld.io import load_matrix

root = Path(tempfile.mkdtemp(prefix="hsld-demo-"))
composition = {"train": 100, "test3": 20, "test7": 20}
manifest = assemble_dataset(1, root / "data", composition, base_seed=5)
print(f"{len(manifest['samples'])} samples written to {root / 'data'}")

# The first train label as an image (hot is red; the top of the image is y = L).
label = load_matrix(root / "data" / manifest["samples"][0]["label"])
(root / "train_0.ppm").write_bytes(render_heatmap(label))

noisy_oracle_predict(root / "data", sigma=0.5, seed=1, out_dir=root / "pred")
report = evaluate_dataset(root / "data", root / "pred")
for split, entry in report["splits"].items():
    mean = entry["mean"]
    rho = entry["spearman"]["mean"] if entry["spearman"] else None
    print(f"{split}: MAE {mean['mae']:.4f}  MaxAE {mean['max_ae']:.3f}  rho {rho}")

# For sigma = 0.5 K the expected MAE is 0.5 * sqrt(2 / pi).
print("closed form MAE:", round(0.5 * np.sqrt(2 / np.pi), 4))
