# %% [markdown]
# # Flat oracles
#
# On the one-end flat model every kernel has a closed form.  This demo
# compares the mode-synthesized resolvent and heat kernel against them and
# plots the relative error.  Run as a script or open as a percent notebook.

# %%
from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from endslab import ModelManifold, PointM, euclidean_resolvent, flat_heat, heat_kernel, resolvent

flat = ModelManifold.flat()
z = PointM.on_axis(1.0)


def partner(d):
    """Point on the same ray at distance ``d`` (geometric mode convergence)."""
    return PointM.on_axis(1.0 + d)


# %%
d_list = np.geomspace(0.5, 50.0, 12)
res_err = {}
for k in (0.0, 0.5, 2.0):
    res_err[k] = [abs(resolvent(flat, k, z, partner(d)) / euclidean_resolvent(3, k, d) - 1) for d in d_list]
    print(f"resolvent k={k}: max rel error {max(res_err[k]):.2e}")

# %%
heat_err = {}
for t in (0.5, 5.0, 50.0):
    heat_err[t] = [abs(heat_kernel(flat, t, z, partner(d)).value / flat_heat(3, t, d) - 1) for d in d_list[:8]]
    print(f"heat t={t}: max rel error {max(heat_err[t]):.2e}")

# %%
out = Path(sys.argv[1]) if len(sys.argv) > 1 else None
if out is not None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(1, 2, figsize=(9, 3.5))
    for k, e in res_err.items():
        ax[0].loglog(d_list, np.maximum(e, 1e-17), "o-", label=f"k={k}")
    for t, e in heat_err.items():
        ax[1].loglog(d_list[:8], np.maximum(e, 1e-17), "o-", label=f"t={t}")
    ax[0].set_title("resolvent")
    ax[1].set_title("heat kernel")
    for a in ax:
        a.set_xlabel("distance")
        a.legend()
    ax[0].set_ylabel("relative error")
    fig.tight_layout()
    out.mkdir(parents=True, exist_ok=True)
    fig.savefig(out / "flat_oracles.svg")
