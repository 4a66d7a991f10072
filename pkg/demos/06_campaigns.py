# Drive a bundled recipe through the campaign runner and poke at its outputs.
# Equivalent to: codelearn run --config fig05_weak_measurement_info --out <dir>
import tempfile
from pathlib import Path

import numpy as np

from codelearn.runner import parse_config, recipe_path, run, validate

out = Path(tempfile.mkdtemp(prefix="codelearn_demo_"))
config = parse_config(recipe_path("fig05_weak_measurement_info.ini"),
                      overrides={"out": out})

print(validate(config))
manifest = run(config)
print(f"\nwrote {manifest.files} to {out} in {manifest.wall_clock_s}s")
print(f"manifest hash {manifest.manifest_hash}\n")

rows = np.genfromtxt(out / "coherent.csv", delimiter=",", names=True,
                     skip_header=3)
for phi in np.unique(rows["phi"]):
    sel = rows[rows["phi"] == phi]
    print(f"phi = {phi / np.pi:.2f} pi:")
    for r in sel:
        print(f"   t = {r['t'] / np.pi:5.3f} pi   I_c = {r['I_c_bits']:.6f}")
