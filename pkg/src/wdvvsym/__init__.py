"""wdvvsym: exact symbolic verification of the Lie symmetry analysis of the
WDVV associativity PDEs, with a high-precision numeric cross-check layer."""

__version__ = "0.1.0"
