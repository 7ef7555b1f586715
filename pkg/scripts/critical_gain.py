"""Principal eigenvalue across the feedback gain, with the branch switch marked."""

import sys

import numpy as np

from tubular_feedback import ReactorParams
from tubular_feedback.spectral import critical_alpha, principal_eigenvalue

params = ReactorParams()
a_star = critical_alpha(params)
print(f"critical gain {a_star:.12f}, shift -v^2/4D = {-params.v**2 / (4 * params.D):g}")
out = sys.stdout
out.write("alpha,lambda0,q,branch\n")
for alpha in np.concatenate([np.linspace(-10, 0.99, 111), [a_star, 1.0]]):
    e = principal_eigenvalue(params, float(alpha))
    out.write(f"{alpha:.6g},{e.lam:.10g},{e.q:.10g},{e.branch.value}\n")
