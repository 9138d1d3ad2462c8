"""Certifying optimal planning for grounded STRIPS tasks.

The planner emits pseudo-Boolean lower-bound certificates; the verifier
checks them against the task without trusting the planner.
"""

__version__ = "0.1.0"
