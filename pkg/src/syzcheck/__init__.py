"""syzcheck: exact Betti numbers and linear-syzygy verification for Veronese
point configurations."""

__version__ = "0.1.0"
