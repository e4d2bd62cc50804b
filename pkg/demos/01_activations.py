"""Tour of the scalar activations behind the scoring models.

The hyper-sig activation is the sum of the bipolar sigmoid and the
hyperbolic tangent. This script prints a value table, checks the rational
closed form against the sum on random inputs, and sketches the curves.

Run:  python demos/01_activations.py
"""

import numpy as np

from earfake.activations import (
    bipolar_sigmoid,
    hyper_sig,
    hyper_sig_derivative,
    hyperbolic_activation,
)

xs = np.array([-5.0, -2.0, -1.0, 0.0, 1.0, 2.0, 5.0])
print("   x    bipolar   tanh      hyper-sig  derivative")
for x in xs:
    print(
        f"{x:5.1f}  {bipolar_sigmoid(x):8.5f}  {hyperbolic_activation(x):8.5f}"
        f"  {hyper_sig(x):9.5f}  {hyper_sig_derivative(x):9.5f}"
    )

# the rational closed form equals the sum of the two components
rng = np.random.default_rng(0)
sample = rng.uniform(-20, 20, size=100_000)
ex, emx, em2x = np.exp(sample), np.exp(-sample), np.exp(-2 * sample)
rational = (2 * ex - 2 * em2x) / (ex + emx + em2x + 1)
values = hyper_sig(sample)
print(f"\nmax |rational form - component sum| on 100k points: "
      f"{np.max(np.abs(rational - values)):.2e}")
print(f"distance of the observed range from the (-2, 2) asymptotes: "
      f"{2 + values.min():.2e} and {2 - values.max():.2e} (never reached)")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    grid = np.linspace(-6, 6, 400)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(grid, bipolar_sigmoid(grid), label="bipolar sigmoid")
    ax.plot(grid, hyperbolic_activation(grid), label="tanh")
    ax.plot(grid, hyper_sig(grid), label="hyper-sig (sum)", linewidth=2)
    ax.plot(grid, hyper_sig_derivative(grid), "--", label="hyper-sig derivative")
    ax.legend()
    ax.grid(alpha=0.3)
    ax.set_title("Activations and the hyper-sig derivative")
    fig.tight_layout()
    fig.savefig("activations.png", dpi=120)
    print("\nwrote activations.png")
except ImportError:
    print("\nmatplotlib not installed; skipping the plot")
