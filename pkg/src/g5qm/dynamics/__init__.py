"""Grids, states, Hamiltonian terms and the split-step solver."""
from .grid import Grid
from .solver import Observables, evolve, observables, step
from .states import FreeGaussian, PauliSpinor, ScalarWavefunction, make_gaussian, make_plane_wave
from .terms import (
    EMPotentials,
    HamiltonianSpec,
    Kinetic,
    LinearPotential,
    MinimalCoupling,
    Potential,
    Rotation,
    SpinField,
    SpinMatrix,
    em_coupling,
    free,
    h_inert,
    h_spin,
    newton_coupling,
    uniform_magnetic_field,
)

__all__ = [
    "Grid", "Observables", "evolve", "observables", "step",
    "FreeGaussian", "PauliSpinor", "ScalarWavefunction", "make_gaussian", "make_plane_wave",
    "EMPotentials", "HamiltonianSpec", "Kinetic", "LinearPotential", "MinimalCoupling", "Potential",
    "Rotation", "SpinField", "SpinMatrix", "em_coupling", "free", "h_inert", "h_spin",
    "newton_coupling", "uniform_magnetic_field",
]
