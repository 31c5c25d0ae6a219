"""Computational companion to Legendre's proof of quadratic reciprocity.

Pell equations, binary quadratic forms and their class numbers, Epstein zeta
partial sums and Euler products, ternary-form solvability, and the search for
Legendre-lemma witnesses (with Teege's descent and the Rogers-Selberg sums).
"""

__version__ = "0.1.0"
