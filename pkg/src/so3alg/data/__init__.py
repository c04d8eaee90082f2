"""Frozen canonical objects used by the fixture verification suite."""
