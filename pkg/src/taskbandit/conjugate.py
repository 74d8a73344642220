"""Exponential-family form of the fusion update.

For a likelihood with natural parameter eta and sufficient statistic T(r),
the conjugate prior has hyperparameters (chi, nu): chi accumulates sufficient
statistics, nu accumulates observation counts. One fused step is

    chi' = (1-forget)*chi + forget*chi0 + (1-mix)*T_explicit + mix*T_implicit
    nu'  = (1-forget)*nu  + forget*nu0  + (1-mix)*n_explicit + mix*n_implicit

The Bernoulli instance (chi = alpha-1, nu = alpha+beta-2, T = successes,
n = rollouts) reproduces the Beta update of the posterior module exactly; the
Gaussian-known-variance instance gives posterior mean chi/nu matching the
standard normal-normal conjugate formula.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

__all__ = [
    "ConjugateState",
    "generic_update",
    "bernoulli_state",
    "bernoulli_roundtrip",
    "beta_params",
    "gaussian_state",
    "posterior_mean_gaussian",
]

_FAMILIES = ("bernoulli", "gaussian-known-variance")


@dataclass(frozen=True)
class ConjugateState:
    chi: float
    nu: float
    chi0: float
    nu0: float
    family: str

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected {_FAMILIES}")
        if self.family == "bernoulli":
            # must map back to a valid Beta
            if self.chi + 1.0 <= 0.0 or self.nu - self.chi + 1.0 <= 0.0:
                raise ValueError(
                    f"(chi, nu) = ({self.chi}, {self.nu}) has no valid Beta image"
                )
        elif self.nu < 0.0:
            raise ValueError(f"nu must be >= 0 for gaussian family, got {self.nu}")


def generic_update(
    state: ConjugateState,
    t_explicit: float,
    n_explicit: float,
    t_implicit: float,
    n_implicit: float,
    forget: float,
    mix: float,
) -> ConjugateState:
    """One fused step on the hyperparameters; family-agnostic."""
    if not 0.0 <= forget <= 1.0:
        raise ValueError(f"forget must lie in [0, 1], got {forget}")
    if not 0.0 <= mix <= 1.0:
        raise ValueError(f"mix must lie in [0, 1], got {mix}")
    keep = 1.0 - forget
    observed = 1.0 - mix
    chi = keep * state.chi + forget * state.chi0 + observed * t_explicit + mix * t_implicit
    nu = keep * state.nu + forget * state.nu0 + observed * n_explicit + mix * n_implicit
    return replace(state, chi=chi, nu=nu)


def bernoulli_roundtrip(alpha: float, beta: float) -> tuple[float, float]:
    """Map Beta(alpha, beta) to its (chi, nu) hyperparameters."""
    if alpha <= 0.0 or beta <= 0.0:
        raise ValueError("alpha and beta must be positive")
    return alpha - 1.0, alpha + beta - 2.0


def beta_params(chi: float, nu: float) -> tuple[float, float]:
    """Inverse of bernoulli_roundtrip: (chi, nu) back to (alpha, beta)."""
    return chi + 1.0, nu - chi + 1.0


def bernoulli_state(
    alpha: float, beta: float, alpha_base: float, beta_base: float
) -> ConjugateState:
    chi, nu = bernoulli_roundtrip(alpha, beta)
    chi0, nu0 = bernoulli_roundtrip(alpha_base, beta_base)
    return ConjugateState(chi=chi, nu=nu, chi0=chi0, nu0=nu0, family="bernoulli")


def gaussian_state(
    prior_mean: float, prior_var: float, noise_var: float
) -> ConjugateState:
    """Known-variance Gaussian: prior N(prior_mean, prior_var) on the mean.

    chi0 = prior_mean*noise_var/prior_var and nu0 = noise_var/prior_var make
    the start state exactly conjugate for any noise_var, so chi/nu equals the
    textbook posterior mean after accumulating reward sums and counts.
    """
    if prior_var <= 0.0 or noise_var <= 0.0:
        raise ValueError("variances must be positive")
    chi0 = prior_mean * noise_var / prior_var
    nu0 = noise_var / prior_var
    return ConjugateState(
        chi=chi0, nu=nu0, chi0=chi0, nu0=nu0, family="gaussian-known-variance"
    )


def posterior_mean_gaussian(state: ConjugateState) -> float:
    if state.family != "gaussian-known-variance":
        raise ValueError("posterior mean chi/nu applies to the gaussian family")
    if state.nu == 0.0:
        raise ValueError("undefined mean: nu is 0")
    return state.chi / state.nu
