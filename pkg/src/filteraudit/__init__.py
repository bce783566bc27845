"""Audit harness for corpus filtering strategies.

Measures how sentence- and document-level filters (lexicon, classifier,
quality) differentially remove mentions of people grouped by gender and
origin.
"""

__version__ = "0.1.0"
