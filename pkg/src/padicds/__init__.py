"""Exact finite models of real and p-adic Duffin-Schaeffer approximation sets."""
