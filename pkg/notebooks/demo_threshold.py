# %% [markdown]
# # Threshold at p = n
#
# The family ``F_K`` keeps ``||F_K||_3`` essentially fixed while
# ``(T F_K)(z_0)`` grows like ``log log K``: evidence that ``T`` is unbounded
# on ``L^3``.  At ``p = 2`` the ratio ``||T F_K||_2 / ||F_K||_2`` settles.
# This is divergence and stability evidence, not an operator-norm proof.

# %%
from __future__ import annotations

from endslab import ModelManifold, threshold_experiment

rep = threshold_experiment(ModelManifold.two_end())
for key, fit in rep.fits.items():
    print(key, {k: round(v, 6) if isinstance(v, float) else v for k, v in fit.items()})

# %%
for row in rep.rows:
    print({k: f"{v:.6g}" if isinstance(v, float) else v for k, v in row.items()})
