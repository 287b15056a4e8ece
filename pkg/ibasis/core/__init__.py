"""Exact arithmetic, the operator algebra, local analysis and the integral-basis algorithms."""
