"""Desk-scale live-video monitoring service.

Segments simulated camera streams into fixed-time chunks, classifies each
chunk into {Falling, Staggering, ChestPain, Normal}, raises and persists
alerts for the critical classes, runs a human review / retraining-feedback
workflow behind a REST API, and ships the evaluation engine (confusion
matrix, class-wise and macro metrics, misclassification breakdown,
throughput benchmark, capacity/cost planner).
"""

__version__ = "0.1.0"
