import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from eqbundles.laurent import LaurentMatrix, parse_laurent


def L(text, conductor=1):
    """Shorthand: parse a Laurent polynomial from its canonical text."""
    return parse_laurent(text, conductor)


def M(rows, conductor=1):
    """Shorthand: matrix from a grid of canonical text entries."""
    return LaurentMatrix(conductor,
                         [[parse_laurent(s, conductor) for s in row]
                          for row in rows])
