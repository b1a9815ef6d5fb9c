# glstep - Ginzburg-Landau energies under a magnetic step
__version__ = "1.0.0"
