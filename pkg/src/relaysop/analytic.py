"""Closed-form secrecy outage probability for the four schemes.

Each scheme's outage probability decomposes into per-relay (or per-rate)
terms built from exponential-mixture antiderivatives: convolution pair
coefficients for the legitimate sum, inclusion-exclusion subset sums over
the eavesdropper rates, and hypoexponential weights for the MRC sums.

The alternating subset sums and the difference-product weights can cancel
catastrophically when rates nearly coincide (identical relays are the common
case), so every assembly runs in mpmath at a working precision sized from
the worst difference-product digit loss; only the finished, well-conditioned
term values are converted back to floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import mpmath as mp

from .errors import SlopeUndefinedError, UnsupportedSizeError
from .expdist import MAX_RATES, spread_rates, subset_rate_sums, working_dps
from .model import (Engine, NetworkConfig, Scheme, SecrecyTarget, SopResult,
                    require_valid)


@dataclass(frozen=True)
class SchemeTermBreakdown:
    """Per-relay term values of a selection-scheme closed form, plus the total.

    Each relay contributes one tuple: the integration-region terms whose sum
    is that relay's share of the outage probability. `total` is the raw sum
    before clipping to [0,1].
    """

    per_relay: tuple
    total: float


def _escalating_sum(build, base_dps: int, max_rounds: int = 6) -> float:
    """Sum the mpf addends produced by build() under escalating precision.

    The rounding error of a cancelling sum is bounded by its largest addend
    times 10^(2-dps); when the total does not clearly dominate that bound
    (high-SNR outage probabilities cancel 30+ digits out of the difference-
    product weights), the evaluation repeats with enough extra digits for
    the total to stand clear. build() must construct its terms from scratch
    so every constant picks up the ambient precision.
    """
    dps = base_dps
    guard = mp.mpf(10) ** 12  # clear digits demanded between total and error
    best = 0.0
    for _ in range(max_rounds):
        with mp.workdps(dps):
            terms = build()
            total = mp.fsum(terms)
            scale = max((abs(t) for t in terms), default=mp.mpf(0))
            if scale == 0:
                return 0.0
            err = scale * mp.power(10, 2 - dps)
            best = float(total)
            if abs(total) >= guard * err or err < mp.mpf("1e-330"):
                return best
            if total != 0:
                deficit = int(mp.ceil(mp.log10(guard * err / abs(total)))) + 5
            else:
                deficit = 15
        dps += max(deficit, 10)
    return best


def _check_engine_size(config: NetworkConfig):
    require_valid(config)
    if config.n_relays > MAX_RATES:
        raise UnsupportedSizeError(
            f"closed-form engines support at most {MAX_RATES} relays, got "
            f"{config.n_relays}; use the Monte Carlo engine")


def _mp_pair(beta_kD_k: float, beta_sd: float):
    """Convolution coefficients of the per-relay legitimate sum, in mpmath.

    Returns ((B1, rate_sd'), (B2, rate_kD')) with near-equal rates spread
    apart first; f_X(x) = B1*exp(-rate_sd'*x) + B2*exp(-rate_kD'*x).
    """
    a, b = spread_rates((beta_kD_k, beta_sd))
    a, b = mp.mpf(a), mp.mpf(b)
    return ((a * b / (a - b), b), (a * b / (b - a), a))


def _selection_relay_terms(config: NetworkConfig, target: SecrecyTarget,
                           k: int, minimize: bool):
    """Outage terms of relay k under eavesdropper-max or -min selection.

    Returns the region terms (threshold-active [, rival-boundary], slack):
    the first covers realizations where the rate threshold binds, the last
    those where the legitimate links already lost. Max selection splits the
    threshold-active region over the rival-best subsets, giving the familiar
    three-term shape; a single relay has no rivals and both schemes collapse
    to the same pair. Each term is a fully flattened addend list so the
    escalating evaluation can bound its own cancellation error.
    """
    others = config.alpha_ke[:k] + config.alpha_ke[k + 1:]
    base_dps = working_dps(spread_rates((config.beta_kD[k], config.beta_sd)))

    def constants():
        rho = mp.mpf(target.rho)
        ase = mp.mpf(config.alpha_se)
        ake = mp.mpf(config.alpha_ke[k])
        return rho, rho - 1, ase, ake, _mp_pair(config.beta_kD[k], config.beta_sd)

    if not others or minimize:
        # min of the rival taps is exponential with the summed rate (0 if none)
        def build_threshold():
            rho, rm1, ase, ake, pairs = constants()
            alpha = mp.mpf(math.fsum(others)) if others else mp.mpf(0)
            sel = ake / (alpha + ake)
            return [sel * ase * B * mp.exp(-b * rm1)
                    / ((rho * b + ase) * ((ake + alpha) / rho + b))
                    for B, b in pairs]

        def build_slack():
            rho, rm1, ase, ake, pairs = constants()
            alpha = mp.mpf(math.fsum(others)) if others else mp.mpf(0)
            sel = ake / (alpha + ake)
            out = []
            for B, b in pairs:
                out.append(sel * B / b)
                out.append(-sel * (B / b) * ase * mp.exp(-b * rm1) / (rho * b + ase))
            return out

        i4 = _escalating_sum(build_threshold, base_dps)
        i5 = _escalating_sum(build_slack, base_dps)
        if minimize:
            return (i4, i5)
        # single relay under max selection: three-slot shape, no rival term
        return (i4, 0.0, i5)

    subs = subset_rate_sums(others)

    def build_i1():
        rho, rm1, ase, ake, pairs = constants()
        out = []
        for m, am_f in subs:
            sgn = -((-1) ** m)
            am = mp.mpf(am_f)
            for B, b in pairs:
                lead = sgn * rho * ase * B * mp.exp(-b * rm1) / (ase + rho * b)
                out.append(lead / (ake + rho * b))
                out.append(-lead / (ake + am + rho * b))
        return out

    def build_i2():
        rho, rm1, ase, ake, pairs = constants()
        return [-((-1) ** m) * (rho * mp.mpf(am) * ase / (ake + mp.mpf(am)))
                * B * mp.exp(-b * rm1) / ((ake + mp.mpf(am) + rho * b) * (ase + rho * b))
                for m, am in subs for B, b in pairs]

    def build_i3():
        rho, rm1, ase, ake, pairs = constants()
        out = []
        for m, am_f in subs:
            sel = -((-1) ** m) * (mp.mpf(am_f) / (ake + mp.mpf(am_f)))
            for B, b in pairs:
                out.append(sel * B / b)
                out.append(-sel * (B / b) * ase * mp.exp(-b * rm1) / (ase + rho * b))
        return out

    return (_escalating_sum(build_i1, base_dps),
            _escalating_sum(build_i2, base_dps),
            _escalating_sum(build_i3, base_dps))


def _selection_breakdown(config: NetworkConfig, target: SecrecyTarget,
                         minimize: bool) -> SchemeTermBreakdown:
    _check_engine_size(config)
    per_relay = tuple(
        _selection_relay_terms(config, target, k, minimize)
        for k in range(config.n_relays))
    total = math.fsum(t for terms in per_relay for t in terms)
    return SchemeTermBreakdown(per_relay=per_relay, total=total)


def _clip(total: float) -> float:
    return min(1.0, max(0.0, total))


def max_e_breakdown(config: NetworkConfig, target: SecrecyTarget) -> SchemeTermBreakdown:
    """Per-relay terms for proactive relay selection by the eavesdropper."""
    return _selection_breakdown(config, target, minimize=False)


def sop_max_e(config: NetworkConfig, target: SecrecyTarget) -> SopResult:
    """SOP when the eavesdropper selects its best-tapped relay."""
    return SopResult(_clip(max_e_breakdown(config, target).total), Engine.ANALYTIC)


def min_e_breakdown(config: NetworkConfig, target: SecrecyTarget) -> SchemeTermBreakdown:
    """Per-relay terms for system-side selection of the weakest-tapped relay."""
    return _selection_breakdown(config, target, minimize=True)


def sop_min_e(config: NetworkConfig, target: SecrecyTarget) -> SopResult:
    """SOP when the system selects the relay with the weakest tap to E."""
    return SopResult(_clip(min_e_breakdown(config, target).total), Engine.ANALYTIC)


def _mp_cdf_weights(rates):
    """Difference-product weights (w_i, r_i): F(x) = 1 - sum(w_i e^{-r_i x})."""
    out = []
    for i, ri in enumerate(rates):
        w = mp.mpf(1)
        for j, rj in enumerate(rates):
            if j != i:
                w *= rj / (rj - ri)
        out.append((w, ri))
    return out


def sop_max_mrc(config: NetworkConfig, target: SecrecyTarget) -> SopResult:
    """SOP with a passive eavesdropper taking its best relayed link while the
    destination combines the direct link and every relayed link."""
    _check_engine_size(config)
    legit = spread_rates((config.beta_sd,) + config.beta_kD)
    subs = subset_rate_sums(config.alpha_ke)

    def build():
        rho = mp.mpf(target.rho)
        rm1 = rho - 1
        ase = mp.mpf(config.alpha_se)
        terms = [mp.mpf(1)]
        for w, b in _mp_cdf_weights([mp.mpf(r) for r in legit]):
            lead = -ase * w * b * mp.exp(-b * rm1)
            terms.append(lead / (b * (ase + rho * b)))
            terms.extend(
                lead * (-1) ** m * rho / ((mp.mpf(am) + rho * b) * (ase + rho * b))
                for m, am in subs)
        return terms

    total = _escalating_sum(build, working_dps(legit))
    return SopResult(_clip(total), Engine.ANALYTIC)


def sop_mrc_mrc(config: NetworkConfig, target: SecrecyTarget) -> SopResult:
    """SOP when both the destination and the eavesdropper combine the direct
    link with every relayed link."""
    _check_engine_size(config)
    legit = spread_rates((config.beta_sd,) + config.beta_kD)
    eve = spread_rates((config.alpha_se,) + config.alpha_ke)

    def build():
        rho = mp.mpf(target.rho)
        rm1 = rho - 1
        wm = _mp_cdf_weights([mp.mpf(r) for r in legit])
        we = _mp_cdf_weights([mp.mpf(r) for r in eve])
        terms = []
        for wi, bi in wm:
            for vp, ap in we:
                prod = wi * vp
                terms.append(prod)
                terms.append(-prod * ap * mp.exp(-rm1 * bi) / (ap + rho * bi))
        return terms

    total = _escalating_sum(build, working_dps(legit, eve))
    return SopResult(_clip(total), Engine.ANALYTIC)


_DISPATCH = {
    Scheme.MAX_E: sop_max_e,
    Scheme.MIN_E: sop_min_e,
    Scheme.MAX_MRC: sop_max_mrc,
    Scheme.MRC_MRC: sop_mrc_mrc,
}


def sop_analytic(config: NetworkConfig, scheme: Scheme, target: SecrecyTarget) -> SopResult:
    """Closed-form SOP for any scheme."""
    return _DISPATCH[scheme](config, target)


def slope_between(sop_lo: float, sop_hi: float,
                  snr_lo_db: float, snr_hi_db: float) -> float:
    """Decade slope of an outage curve between two axis points.

    A curve proportional to SNR^-d has slope d for any point pair.
    """
    if not snr_hi_db > snr_lo_db:
        raise ValueError("snr_hi_db must exceed snr_lo_db")
    if sop_lo <= 0.0 or sop_hi <= 0.0:
        raise SlopeUndefinedError(
            f"SOP underflowed to zero between {snr_lo_db} and {snr_hi_db} dB")
    return -(math.log10(sop_hi) - math.log10(sop_lo)) / ((snr_hi_db - snr_lo_db) / 10.0)


def diversity_slope(scheme: Scheme, config_at: Callable[[float], NetworkConfig],
                    target: SecrecyTarget, snr_lo_db: float, snr_hi_db: float) -> float:
    """Decades of SOP lost per decade of SNR between two axis points.

    config_at maps an axis SNR in dB to the network at that operating point.
    The high-SNR limit of this slope is the secrecy diversity order.
    """
    if not snr_hi_db > snr_lo_db:
        raise ValueError("snr_hi_db must exceed snr_lo_db")
    lo = sop_analytic(config_at(snr_lo_db), scheme, target).value
    hi = sop_analytic(config_at(snr_hi_db), scheme, target).value
    return slope_between(lo, hi, snr_lo_db, snr_hi_db)
