"""
Hyperpersist - Persistent Homology for Hypergraphs
====================================================
Computes embedded, associated-complex and lower-associated-complex
persistence for filtered hypergraphs, bottleneck distances between the
resulting diagrams, and kernel/image/cokernel persistence of the maps a
hypergraph morphism induces.

Usage:
  python main.py persist example.hg --dim 1
  python main.py distance a.hg b.hg --p inf
  python main.py morphism dom.hg cod.hg map.txt --direction pullback
  python main.py evolve snapshots/ --dim 0
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.hyperpersist.cli import main


if __name__ == "__main__":
    main()
