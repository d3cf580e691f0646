"""Figure-reproduction presets as pure data.

Each preset lists the axis grid, threshold rates, schemes and one link-policy
object per variant; changing a preset never touches engine code. The same
link-policy data also parameterizes the cross-validation grid, where every
family must resolve at any relay count: entries marked per_n carry the
reconstruction rule for counts the original setup did not state.
"""

from __future__ import annotations

from .model import Scheme
from .sweep import SpecValidationError, SweepSpec, _parse_policy, config_from_links

# mean SNRs in dB unless noted; fractions are linear-scale shares of the axis
_EVE_LADDER_DB = (0.0, 3.0, 6.0, 9.0)

FIGURE_PRESETS = {
    "fig2": {
        "snr_db": {"start": 0.0, "stop": 40.0, "step": 5.0},
        "rs_values": (0.0, 1.0),
        "schemes": ("max-e", "min-e"),
        "variants": tuple(
            {"label": f"n{n}", "n_relays": n,
             "links": {
                 "s_relays": {"policy": "equal-split"},
                 "relays_d": {"policy": "equal-split"},
                 "s_d": {"policy": "fixed-db", "mean_snr_db": 3.0},
                 "relays_e": {"policy": "fixed-db", "mean_snr_db": 3.0},
                 "s_e": {"policy": "fixed-db", "mean_snr_db": 0.0},
             }} for n in (1, 2, 3, 4)),
    },
    "fig3": {
        "snr_db": {"start": 0.0, "stop": 40.0, "step": 2.0},
        "rs_values": (0.0, 1.0),
        "schemes": ("max-e", "min-e"),
        "variants": (
            {"label": "balanced", "n_relays": 4,
             "links": {
                 "s_relays": {"policy": "equal-split"},
                 "relays_d": {"policy": "equal-split"},
                 "s_d": {"policy": "fixed-db", "mean_snr_db": 3.0},
                 "relays_e": {"policy": "fixed-db",
                              "mean_snr_db": list(_EVE_LADDER_DB)},
                 "s_e": {"policy": "fixed-db", "mean_snr_db": 0.0},
             }},
            {"label": "unbalanced", "n_relays": 4,
             "links": {
                 "s_relays": {"policy": "fixed-db", "mean_snr_db": 30.0},
                 "relays_d": {"policy": "fraction-of-axis", "fraction": 1.0},
                 "s_d": {"policy": "fixed-db", "mean_snr_db": 3.0},
                 "relays_e": {"policy": "fixed-db",
                              "mean_snr_db": list(_EVE_LADDER_DB)},
                 "s_e": {"policy": "fixed-db", "mean_snr_db": 0.0},
             }},
        ),
    },
    "fig4": {
        "snr_db": {"start": 0.0, "stop": 40.0, "step": 5.0},
        "rs_values": (1.0,),
        "schemes": ("max-e", "min-e", "max-mrc", "mrc-mrc"),
        # both hops of branch k get fraction_k of the axis; fractions sum to
        # 0.5 so all hop shares total 100%
        "variants": (
            {"label": "n2", "n_relays": 2,
             "links": {
                 "s_relays": {"policy": "fraction-of-axis", "fraction": [0.2, 0.3]},
                 "relays_d": {"policy": "fraction-of-axis", "fraction": [0.2, 0.3]},
                 "s_d": {"policy": "fixed-db", "mean_snr_db": 3.0},
                 "relays_e": {"policy": "fixed-db", "mean_snr_db": [6.0, 9.0]},
                 "s_e": {"policy": "fixed-db", "mean_snr_db": -3.0},
             }},
            {"label": "n4", "n_relays": 4,
             "links": {
                 "s_relays": {"policy": "fraction-of-axis",
                              "fraction": [0.05, 0.10, 0.15, 0.20]},
                 "relays_d": {"policy": "fraction-of-axis",
                              "fraction": [0.05, 0.10, 0.15, 0.20]},
                 "s_d": {"policy": "fixed-db", "mean_snr_db": 3.0},
                 "relays_e": {"policy": "fixed-db",
                              "mean_snr_db": list(_EVE_LADDER_DB)},
                 "s_e": {"policy": "fixed-db", "mean_snr_db": -3.0},
             }},
        ),
    },
}

#: per-relay hop fractions for the mixed-rate family at any relay count
_FIG4_FRACTIONS = {
    1: (0.5,),
    2: (0.2, 0.3),
    3: (0.10, 0.15, 0.25),
    4: (0.05, 0.10, 0.15, 0.20),
}

PARAM_FAMILIES = ("fig2", "fig3-balanced", "fig3-unbalanced", "fig4")


def family_links(family: str, n_relays: int) -> dict:
    """Link-policy data of one parameter family, resolved for n_relays."""
    if family == "fig2":
        return FIGURE_PRESETS["fig2"]["variants"][0]["links"]
    if family == "fig3-balanced":
        links = dict(FIGURE_PRESETS["fig3"]["variants"][0]["links"])
        links["relays_e"] = {"policy": "fixed-db",
                             "mean_snr_db": list(_EVE_LADDER_DB[:n_relays])}
        return links
    if family == "fig3-unbalanced":
        links = dict(FIGURE_PRESETS["fig3"]["variants"][1]["links"])
        links["relays_e"] = {"policy": "fixed-db",
                             "mean_snr_db": list(_EVE_LADDER_DB[:n_relays])}
        return links
    if family == "fig4":
        fr = list(_FIG4_FRACTIONS[n_relays])
        return {
            "s_relays": {"policy": "fraction-of-axis", "fraction": fr},
            "relays_d": {"policy": "fraction-of-axis", "fraction": fr},
            "s_d": {"policy": "fixed-db", "mean_snr_db": 3.0},
            "relays_e": {"policy": "fixed-db",
                         "mean_snr_db": list(_EVE_LADDER_DB[-n_relays:])},
            "s_e": {"policy": "fixed-db", "mean_snr_db": -3.0},
        }
    raise ValueError(f"unknown parameter family {family!r}")


def _policies(links_data: dict, n_relays: int) -> dict:
    violations: list = []
    out = {}
    for group, raw in links_data.items():
        pol = _parse_policy(group, raw, violations)
        if pol is not None:
            out[group] = pol
    if violations:
        raise SpecValidationError(violations)
    return out


def family_config(family: str, n_relays: int, snr_db: float):
    """NetworkConfig of one family at one axis point."""
    links = _policies(family_links(family, n_relays), n_relays)
    return config_from_links(links, n_relays, snr_db)


def figure_sweep_specs(figure: str, trials: int = 1_000_000, seed: int = 12345,
                       engines=("analytic", "mc")):
    """(label, SweepSpec) pairs for one figure preset."""
    preset = FIGURE_PRESETS[figure]
    out = []
    for variant in preset["variants"]:
        spec = SweepSpec(
            n_relays=variant["n_relays"],
            snr_start_db=preset["snr_db"]["start"],
            snr_stop_db=preset["snr_db"]["stop"],
            snr_step_db=preset["snr_db"]["step"],
            rs_values=tuple(preset["rs_values"]),
            schemes=tuple(Scheme(s) for s in preset["schemes"]),
            engines=tuple(engines),
            links=_policies(variant["links"], variant["n_relays"]),
            trials=trials,
            seed=seed,
        )
        out.append((variant["label"], spec))
    return out
