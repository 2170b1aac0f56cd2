"""Clayton-copula model for paired binary (bilateral) outcome data.

Fits group success rates and the dependence parameter by maximum likelihood,
runs likelihood-ratio / score / Wald homogeneity tests, and drives seeded
Monte Carlo Type-I-error and power studies. The heavy lifting lives in the
compiled extension; this package re-exports its surface.
"""

from bilat._core import (  # noqa: F401
    BilatError,
    FrequencyTable,
    __version__,
    cell_probs,
    chisq_sf,
    classical_equivalents,
    clayton_cdf,
    fit,
    generate_table,
    kendall_tau,
    loglik,
    lr_test,
    pearson_rho,
    read_table_csv,
    run_power,
    run_tests,
    run_tie,
    score_test,
    tau_to_theta,
    wald_test,
)

__all__ = [
    "BilatError",
    "FrequencyTable",
    "__version__",
    "cell_probs",
    "chisq_sf",
    "classical_equivalents",
    "clayton_cdf",
    "fit",
    "generate_table",
    "kendall_tau",
    "loglik",
    "lr_test",
    "pearson_rho",
    "read_table_csv",
    "run_power",
    "run_tests",
    "run_tie",
    "score_test",
    "tau_to_theta",
    "wald_test",
]
