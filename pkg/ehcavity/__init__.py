"""Cubic vacuum nonlinearity in conducting cavities: sources, resonances, dynamics."""
from ehcavity.data_models.cavity import CavityGeometry, ModeSpec
from ehcavity.data_models.physics import PhysicalConstants
from ehcavity.resonance import analyze
