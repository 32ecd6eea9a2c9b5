"""Secant equations toolkit: exact invariants, dimensions and equation search for binary tensors."""
