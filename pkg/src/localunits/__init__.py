"""Galois-module structure of local unit filtrations."""
