"""Multi-interest process pattern discovery over event logs.

The package turns a CSV event log into partially ordered traces, grows small
labeled-DAG activity patterns by iterative extension, scores each pattern with
outcome-oriented interest functions (case coverage, outcome interest, case
distance), and keeps the Pareto front of every iteration.  A FastAPI service
exposes live discovery sessions to a browser UI; a CLI drives batch discovery
and the cross-validated evaluation harness.
"""

__version__ = "0.1.0"
