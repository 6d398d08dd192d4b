"""Effectful Mealy machines over exact finite effect theories."""
