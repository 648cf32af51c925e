"""Sub-THz link planning: channel loss spectra, link budgets, sub-array
tradeoffs and transmission-window band plans."""

__version__ = "0.1.0"
