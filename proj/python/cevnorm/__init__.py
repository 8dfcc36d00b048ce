# Copyright 2026 cevnorm developers
# SPDX-License-Identifier: Apache-2.0
"""Conditional extreme value norming: simulation, limit laws and tests."""

from ._cevnorm import (
    CapacityError,
    ConfigError,
    ConvergenceError,
    DataError,
    DomainError,
    ErvParams,
    Error,
    IoError,
    Model,
    NoiseLaw,
    PreconditionError,
    __version__,
    alpha,
    apply_norming,
    beta,
    chi_hat,
    draw_exceedances,
    factorization_gap,
    factorization_stat,
    fit_norming,
    kernel_cdf,
    limit_H,
    limit_shift,
    marginal_H,
    permutation_independence_test,
    psi,
    run_command,
    theoretical_Gv,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
