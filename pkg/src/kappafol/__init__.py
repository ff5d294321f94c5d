"""Proof kernel and finite-semantics workbench for infinitary intuitionistic
first-order logic, instantiated at finite index bounds."""

__version__ = "0.1.0"
