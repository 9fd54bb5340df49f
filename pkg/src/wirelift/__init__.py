"""wirelift: a desk-scale split-manufacturing security toolkit.

Protects gate-level layouts by concerted wire lifting, splits them into
FEOL/BEOL views, attacks the FEOL view with proximity-based reconnection,
and scores the result (OPP, PNR, CCR, OER, HD, PPA proxies).
"""

__version__ = "0.1.0"
