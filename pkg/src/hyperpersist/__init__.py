"""Hyperpersist - persistent homology for filtered hypergraphs and their morphisms."""
