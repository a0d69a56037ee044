"""Preoperative decision support for sinus-surgery outcome prediction.

Predicts, from preoperative clinical variables only, whether a patient will
reach a clinically meaningful symptom-score improvement after surgery, and
wraps the model zoo in evaluation, interpretability, human-benchmarking, and
serving layers.
"""

__version__ = "0.1.0"
