"""
Ontoprobe Module
Competency-question evaluation of first-order ontologies with refutation provers
"""

__version__ = "0.3.0"
