"""Nielsen moves, T-systems and generation of direct powers over finite groups."""

__version__ = "0.1.0"
