"""Exact and approximate implication between conditional-independence
statements over jointly distributed discrete random variables.

Subpackages cover the ground types (core), the atom calculus over positive
polymatroids (imeasure), semigraphoid/graphoid closure (graphoid), graph
separation for Markov and Bayesian networks (graphsep), rational LP
certificates over the Shannon cone (shannon), and explicit distributions
including the strictly positive family on which the intersection axiom
admits no finite relaxation factor (distmodel).  A FastAPI service
(service) exposes every engine over HTTP and the command line client (cli)
rides it in-process.
"""

__version__ = "0.1.0"
