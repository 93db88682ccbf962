"""Learning the memory structure of time-varying lossy Gaussian channels from Choi-state features."""

__version__ = "0.1.0"
