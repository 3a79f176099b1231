# %% [markdown]
# # Riesz kernel decay through the neck
#
# With two Euclidean ends the kernel of ``T = d Delta^{-1/2}`` decays only
# like ``|z'|^{1-n}``, with leading coefficient ``c_n |d Phi(z)|``.  On one
# flat end the decay is ``|z'|^{-n}``.

# %%
from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from endslab import ModelManifold, PointM, phi_plus, riesz_kernel_row
from endslab.riesz import sqrt_inverse_constant

two = ModelManifold.two_end()
flat = ModelManifold.flat()
r_list = 20.0 * 2.0 ** np.arange(6)

# %%
prof = phi_plus(two)
rows = {}
for zr in (-0.5, 0.0, 0.5):
    rep = riesz_kernel_row(two, PointM.on_axis(zr), r_list=r_list)
    c = rep.fits["coefficient"]
    rows[zr] = [r["value"] for r in rep.rows]
    print(f"z={zr:+.1f}: exponent {rep.fits['decay']['exponent']:.3f}, "
          f"coefficient/|Phi'| = {c['coefficient_over_dphi']:.6f} (c_3 = {sqrt_inverse_constant(3):.6f})")

# %%
ctrl = riesz_kernel_row(flat, PointM.on_axis(0.5), r_list=r_list)
print(f"one flat end: exponent {ctrl.fits['decay']['exponent']:.3f}")

# %%
out = Path(sys.argv[1]) if len(sys.argv) > 1 else None
if out is not None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    for zr, v in rows.items():
        ax.loglog(r_list, v, "o-", label=f"two ends, z={zr}")
    ax.loglog(r_list, [r["value"] for r in ctrl.rows], "s--", label="one end")
    ax.set_xlabel("r'")
    ax.set_ylabel("|T(z, z')|")
    ax.legend(fontsize=8)
    fig.tight_layout()
    out.mkdir(parents=True, exist_ok=True)
    fig.savefig(out / "riesz_decay.svg")
