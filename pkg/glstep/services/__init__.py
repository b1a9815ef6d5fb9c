"""
Computational services: spectral problems, energy minimization and phase classification
"""
