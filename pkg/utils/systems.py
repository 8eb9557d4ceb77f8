"""
systems.py
----------
Catalog of the evaluated multi-channel systems and loader for flat
key=value system files.

A system layout is a set of channel slots (`main`, `aux`, `ref0`..`ref4`)
plus a link budget. `SystemLayout.at(...)` places it at concrete distances
and yields the `SystemSpec` that analytics evaluates.

System files use the .env grammar (parsed by python-dotenv):

    # two-channel system with a weaker auxiliary transmitter
    base=main-aux
    label=main+aux (-18 dBm aux)
    aux.tx_power_dbm=-18
    noise_figure_db=8
"""

from dataclasses import dataclass, replace
from pathlib import Path

from dotenv import dotenv_values

from utils.analytics import SystemSpec
from utils.link_model import ChannelConfig, LinkBudget, Modulation, presets


@dataclass(frozen=True)
class ChannelSlot:
    slot: str
    role: str               # "main", "aux" or "ref"
    channel: ChannelConfig

    @property
    def carries_information(self) -> bool:
        return self.role != "aux"


@dataclass(frozen=True)
class SystemLayout:
    name: str
    label: str
    slots: tuple[ChannelSlot, ...]
    budget: LinkBudget = LinkBudget()

    @property
    def is_two_channel(self) -> bool:
        roles = {s.role for s in self.slots}
        return {"main", "aux"} <= roles

    def slot(self, key: str) -> ChannelSlot:
        for s in self.slots:
            if s.slot == key:
                return s
        raise KeyError(f"System {self.name!r} has no channel slot {key!r}; "
                       f"slots: {[s.slot for s in self.slots]}")

    @property
    def main(self) -> ChannelSlot:
        return self.slot("main")

    @property
    def aux(self) -> ChannelSlot:
        return self.slot("aux")

    def at(self, d_main: float, d_aux: float | None = None,
           code_rate: float = 1.0) -> SystemSpec:
        """Places every channel at d_main, except the auxiliary one at d_aux (default d_main)."""
        d_aux = d_main if d_aux is None else d_aux
        channels = tuple(
            (s.channel, d_aux if s.role == "aux" else d_main) for s in self.slots
        )
        return SystemSpec(
            channels=channels,
            code_rate=code_rate,
            label=self.label,
            information=tuple(s.carries_information for s in self.slots),
        )


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

DEFAULT_SYSTEM = "main-aux"


def _refs(channels: list[ChannelConfig], modulation: Modulation) -> tuple[ChannelSlot, ...]:
    return tuple(
        ChannelSlot(f"ref{i}", "ref", replace(c, modulation=modulation))
        for i, c in enumerate(channels)
    )


def system_presets() -> dict[str, SystemLayout]:
    ch = presets()
    five = [c for name, c in sorted(ch.items()) if name.startswith("ref-2.16-")]

    catalog = {
        "main-aux": SystemLayout(
            name="main-aux",
            label="main 16QAM 8.64 GHz + aux BPSK 2.16 GHz",
            slots=(ChannelSlot("main", "main", ch["main-8.64"]),
                   ChannelSlot("aux", "aux", ch["aux-2.16"])),
        ),
        "ref-5x2.16": SystemLayout(
            name="ref-5x2.16", label="5 x 2.16 GHz BPSK",
            slots=_refs(five, Modulation.BPSK),
        ),
        "ref-5x2.16-qam16": SystemLayout(
            name="ref-5x2.16-qam16", label="5 x 2.16 GHz 16QAM",
            slots=_refs(five, Modulation.QAM16),
        ),
        "ref-1x10.80": SystemLayout(
            name="ref-1x10.80", label="1 x 10.80 GHz 16QAM",
            slots=_refs([ch["ref-10.80"]], Modulation.QAM16),
        ),
        "ref-1x10.80-bpsk": SystemLayout(
            name="ref-1x10.80-bpsk", label="1 x 10.80 GHz BPSK",
            slots=_refs([ch["ref-10.80"]], Modulation.BPSK),
        ),
    }

    # Every single channel preset is also usable on its own
    for name, c in ch.items():
        catalog.setdefault(name, SystemLayout(
            name=name, label=name, slots=(ChannelSlot("ref0", "ref", c),),
        ))
    return catalog


# ---------------------------------------------------------------------------
# System files
# ---------------------------------------------------------------------------

_CHANNEL_FIELDS = {
    "center_freq_hz": ("center_freq", float),
    "bandwidth_hz":   ("bandwidth", float),
    "nyquist_bw_hz":  ("nyquist_bw", float),
    "modulation":     ("modulation", Modulation.parse),
    "tx_power_dbm":   ("tx_power", float),
    "roll_off":       ("roll_off", float),
}

_BUDGET_FIELDS = {
    "tx_gain_dbi":               "tx_gain",
    "rx_gain_dbi":               "rx_gain",
    "noise_temp_k":              "noise_temp",
    "noise_figure_db":           "noise_figure",
    "atmospheric_loss_db_per_m": "atmospheric_loss",
}


def apply_overrides(layout: SystemLayout, values: dict[str, str]) -> SystemLayout:
    """
    Applies flat key=value overrides on top of a layout.

    Raises:
        ValueError: unknown key, unknown slot, or a value that does not parse.
    """
    budget_changes = {}
    slot_changes: dict[str, dict] = {}
    label = layout.label

    for key, raw in values.items():
        if key == "base":
            continue
        if raw is None:
            raise ValueError(f"System file key {key!r} has no value")
        raw = raw.strip()
        try:
            if key == "label":
                label = raw
            elif key in _BUDGET_FIELDS:
                budget_changes[_BUDGET_FIELDS[key]] = float(raw)
            elif "." in key:
                slot, field = key.split(".", 1)
                if field not in _CHANNEL_FIELDS:
                    raise ValueError(f"unknown channel field {field!r}")
                layout.slot(slot)
                attr, parse = _CHANNEL_FIELDS[field]
                slot_changes.setdefault(slot, {})[attr] = parse(raw)
            else:
                raise ValueError("unknown key")
        except KeyError as exc:
            raise ValueError(f"System file key {key!r}: {exc.args[0]}") from exc
        except ValueError as exc:
            raise ValueError(f"System file key {key!r}={raw!r}: {exc}") from exc

    slots = tuple(
        replace(s, channel=s.channel.with_overrides(**slot_changes[s.slot]))
        if s.slot in slot_changes else s
        for s in layout.slots
    )
    return replace(layout, label=label, slots=slots,
                   budget=replace(layout.budget, **budget_changes))


def load_system_file(path: str | Path) -> SystemLayout:
    values = dotenv_values(path)
    base = (values.get("base") or DEFAULT_SYSTEM).strip()
    layout = get_system(base)
    layout = apply_overrides(layout, values)
    return replace(layout, name=Path(path).stem)


def get_system(name: str) -> SystemLayout:
    catalog = system_presets()
    if name not in catalog:
        raise KeyError(f"Unknown system {name!r}; available: {sorted(catalog)}")
    return catalog[name]


def load_system(spec: str) -> SystemLayout:
    """Resolves `--system`: an existing file path is parsed, anything else is a preset name."""
    if Path(spec).is_file():
        return load_system_file(spec)
    return get_system(spec)
