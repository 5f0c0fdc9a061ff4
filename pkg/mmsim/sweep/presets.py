"""Figure presets: the sweep protocols behind each density and line plot panel."""
from mmsim.errors import PresetError
from mmsim.schemas import PrescanSpec, SweepAxis, SweepSpec

# |G_eff| = 0.48 ω_b (2π × 4.8 MHz for Table 1), shared by every preset.
FIGURE_G_TARGET = 0.48

_PANEL_PAIRS = (
    ("c1-c2",),
    ("c1-m2", "c2-m1"),
    ("c1-b2", "c2-b1"),
)

_FIG4_PAIRS = ("c1-c2", "c1-m2", "c2-m1", "c1-b2", "c2-b1")

_FIG5_PAIRS = ("c1-c2", "m1-b1", "m2-b2", "c1-m2", "c2-m1", "c1-b2", "c2-b1")

_HOPPING = (0.5, 0.8, 1.0)


def _detuning_axes(count: int) -> tuple[SweepAxis, ...]:
    return (
        SweepAxis(name="Delta1", start=-2.0, stop=2.0, count=count),
        SweepAxis(name="Delta2", start=-2.0, stop=2.0, count=count),
    )


def _base_constraints(**extra: float) -> dict[str, float]:
    constraints = {"Delta_m1": 1.0, "Delta_m2": 1.0, "G_target": FIGURE_G_TARGET}
    constraints.update(extra)
    return constraints


def _fig2(panel: int, count_2d: int, prescan_count: int) -> SweepSpec:
    pairs = _PANEL_PAIRS[panel % 3]
    name = "fig2" + "abcdef"[panel]
    if panel < 3:
        return SweepSpec(
            name=name,
            axes=_detuning_axes(count_2d),
            constraints=_base_constraints(hop_Gamma=1.0),
            pairs=pairs,
        )
    return SweepSpec(
        name=name,
        axes=(
            SweepAxis(name="Delta_m1", start=0.8, stop=1.1, count=count_2d),
            SweepAxis(name="Delta_m2", start=0.8, stop=1.1, count=count_2d),
        ),
        # Δm constraints hold during the prescan; the axes override them per point
        constraints=_base_constraints(hop_Gamma=1.0),
        pairs=pairs,
        prescan=PrescanSpec(count=prescan_count, pair=pairs[0]),
    )


def _fig3(panel: int, count_2d: int) -> SweepSpec:
    return SweepSpec(
        name="fig3" + "abcdefghi"[panel],
        axes=_detuning_axes(count_2d),
        constraints=_base_constraints(hop_Gamma=_HOPPING[panel // 3]),
        pairs=_PANEL_PAIRS[panel % 3],
    )


def _fig4(panel: int, count_2d: int) -> SweepSpec:
    return SweepSpec(
        name="fig4" + "abcdefghij"[panel],
        axes=(
            SweepAxis(name="Delta1", start=-2.0, stop=2.0, count=count_2d),
            # Γ in units of κ_c
            SweepAxis(name="hop_Gamma", start=0.0, stop=10.0, count=count_2d, unit="kappa_c"),
        ),
        constraints=_base_constraints(Delta2=1.0 if panel < 5 else -1.0),
        pairs=(_FIG4_PAIRS[panel % 5],),
    )


def _fig5(panel: int, count_1d: int) -> SweepSpec:
    axis = "Delta_sym" if panel < 3 else "Delta_antisym"
    return SweepSpec(
        name="fig5" + "abcdef"[panel],
        axes=(SweepAxis(name=axis, start=-2.0, stop=2.0, count=count_1d),),
        constraints=_base_constraints(hop_Gamma=_HOPPING[panel % 3]),
        pairs=_FIG5_PAIRS,
    )


PRESET_NAMES: tuple[str, ...] = (
    tuple(f"fig2{c}" for c in "abcdef")
    + tuple(f"fig3{c}" for c in "abcdefghi")
    + tuple(f"fig4{c}" for c in "abcdefghij")
    + tuple(f"fig5{c}" for c in "abcdef")
)


def preset(
    name: str,
    count_2d: int = 201,
    count_1d: int = 801,
    prescan_count: int = 41,
) -> SweepSpec:
    """Sweep spec reproducing one figure panel."""
    if name not in PRESET_NAMES:
        raise PresetError(
            f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}"
        )
    figure, panel = name[:4], "abcdefghij".index(name[4])
    if figure == "fig2":
        return _fig2(panel, count_2d, prescan_count)
    if figure == "fig3":
        return _fig3(panel, count_2d)
    if figure == "fig4":
        return _fig4(panel, count_2d)
    return _fig5(panel, count_1d)
