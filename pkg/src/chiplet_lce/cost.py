"""Recurring (RE) and non-recurring (NRE) engineering cost."""

from __future__ import annotations

from typing import Iterable

from .config import CostBook


class ZeroYieldError(ValueError):
    """A yield in a cost denominator is zero."""


def chiplet_re_cost(module_si_costs: Iterable[float], cost_book: CostBook, observed_yield: float,
                    n_data: float | None = None) -> float:
    """Per good chiplet: silicon plus data wiring, divided by the observed yield.

    ``n_data`` overrides ``cost_book.data_wire_count_Ndata`` as the total wire
    count (evaluation passes wires-per-link times the mesh link count).
    """
    if observed_yield <= 0:
        raise ZeroYieldError("observed chiplet yield is zero")
    wires = cost_book.data_wire_count_Ndata if n_data is None else n_data
    return (sum(module_si_costs) + cost_book.data_wire_cost_Cdata * wires) / observed_yield


def chiplet_nre_cost(area: float, cost_book: CostBook) -> float:
    if area < 0:
        raise ValueError("area must be >= 0")
    return cost_book.nre_area_coeff_Kchip * area + cost_book.nre_fixed_Cfix


def amortized_nre(total_nre: float, volume: int) -> float:
    if volume < 1:
        raise ValueError("volume must be >= 1")
    return total_nre / volume


def interposer_cost(cost_book: CostBook, bonded_sites: int) -> float:
    """Base interposer cost plus one increment per bonded chiplet site."""
    return cost_book.interposer_cost_Cint + cost_book.interposer_cost_per_site * bonded_sites


def package_re_cost(chiplet_re_sum: float, cost_book: CostBook, y_chiplet_int: float,
                    y_int_sub: float, c_int: float | None = None) -> float:
    """2.5D package RE: chiplets, interposer and substrate over the two bonding yields."""
    if y_chiplet_int <= 0 or y_int_sub <= 0:
        raise ZeroYieldError("packaging yield is zero")
    c_int = cost_book.interposer_cost_Cint if c_int is None else c_int
    return (chiplet_re_sum + c_int + cost_book.substrate_cost_Csub) / (y_chiplet_int * y_int_sub)


def package_nre_cost(chiplet_nres: Iterable[float], cost_book: CostBook) -> float:
    """Chiplet NRE plus interposer NRE.

    With ``nre_share`` a homogeneous package pays one design's NRE: identical
    entries are counted once.
    """
    nres = list(chiplet_nres)
    if cost_book.nre_share:
        nres = list(dict.fromkeys(nres))
    return sum(nres) + cost_book.nre_interposer


def total_cost(re: float, nre_per_chip: float) -> float:
    return re + nre_per_chip
