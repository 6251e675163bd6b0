"""Differentiable quantum architecture search for job-shop scheduling QUBOs."""

__version__ = "0.1.0"
