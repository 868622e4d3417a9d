"""Offline trainer for the attention-based node scorer.

Talks to the solver package only through its command-line interface and
file formats: edge-list TSVs and instance JSONs in, portable weight-file
JSON out.
"""

__version__ = "0.1.0"
