"""Named scenario presets (fig4 .. fig11), each a list of CSV curves.

A curve is one (scheme, parameter value) pair.  SNR axes default to -10..10
dB in 2 dB steps; RF-chain, antenna and bit sweeps run at a single 0 dB point.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .harness import Axis, ScenarioConfig, Scheme

FULL = (Scheme.NUQ_FULL, Scheme.UQ_OMP, Scheme.FULLY_DIGITAL)
SUB = (Scheme.NUQ_SUB, Scheme.UQ_OMP, Scheme.FULLY_DIGITAL)


@dataclass(frozen=True)
class Curve:
    name: str
    config: ScenarioConfig
    scheme: Scheme
    axis: Axis = Axis.SNR
    values: tuple = ()


def _full(**kw) -> ScenarioConfig:
    return ScenarioConfig(n_t=144, n_r=36, **kw)


def _per_value(fig, label, configs, schemes):
    return [Curve(f"{fig}_{s.value}_{label}{v}", dataclasses.replace(c, schemes=(s,)), s)
            for v, c in configs for s in schemes]


def fig4():
    return _per_value("fig4", "P", [(P, _full(n_rf_t=8, n_rf_r=8, P=P, Q=2, b=8)) for P in (2, 3, 4)], FULL)


def fig5():
    return _per_value("fig5", "Q", [(Q, _full(n_rf_t=8, n_rf_r=8, P=2, Q=Q, b=8)) for Q in (2, 3, 4)], FULL)


def fig6():
    base = _full(n_rf_t=4, n_rf_r=4, P=2, Q=2)
    curves = _per_value("fig6", "b", [(b, dataclasses.replace(base, b=b)) for b in (6, 7, 8)], (Scheme.NUQ_FULL,))
    curves += _per_value("fig6", "b", [(b, dataclasses.replace(base, b=b)) for b in (7, 8, 9)], (Scheme.UQ_OMP,))
    curves += _per_value("fig6", "b", [(8, dataclasses.replace(base, b=8))], (Scheme.FULLY_DIGITAL,))
    return curves


def fig7():
    curves = []
    for P in (1, 2, 3):
        base = _full(n_rf_t=8, n_rf_r=8, P=P, Q=2, b=8, snr_grid_db=(0.0,))
        for s in FULL:
            curves.append(Curve(f"fig7_{s.value}_P{P}", dataclasses.replace(base, schemes=(s,)), s,
                                Axis.RF_CHAINS, tuple(range(P * 2, 9))))
    return curves


def _antenna_sweep(fig, axis, values):
    base = _full(n_rf_t=4, n_rf_r=4, P=2, Q=2, b=8, snr_grid_db=(0.0,))
    return [Curve(f"{fig}_{s.value}", dataclasses.replace(base, schemes=(s,)), s, axis, values) for s in FULL]


def fig8():
    return _antenna_sweep("fig8", Axis.TX_ANTENNAS, (36, 64, 100, 144, 196, 256))


def fig9():
    return _per_value("fig9", "P", [(P, _full(n_rf_t=P, n_rf_r=P, P=P, Q=1, b=6)) for P in (2, 3)], SUB)


def fig10():
    return _per_value("fig10", "Q", [(Q, _full(n_rf_t=2 * Q, n_rf_r=2 * Q, P=2, Q=Q, b=6)) for Q in (1, 2)], SUB)


def fig11():
    base = _full(n_rf_t=3, n_rf_r=3, P=3, Q=1, b=6, snr_grid_db=(0.0,))
    return [Curve(f"fig11_{s.value}", dataclasses.replace(base, schemes=(s,)), s, Axis.BITS, tuple(range(3, 11)))
            for s in SUB]


FIGURES = {
    "fig4": fig4, "fig5": fig5, "fig6": fig6, "fig7": fig7,
    "fig8": fig8, "fig9": fig9, "fig10": fig10, "fig11": fig11,
}


def figure_curves(figure_id: str) -> list[Curve]:
    return FIGURES[figure_id]()
