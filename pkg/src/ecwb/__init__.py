"""ecwb: an exact workbench for categories enriched in chain complexes.

Subpackages build upward from exact linear algebra to chain complexes with
their closed symmetric monoidal structure, small enriched categories and
presheaves over them, and Morita-style comparison machinery, with a batch
CLI on top.
"""

__version__ = "0.1.0"
