"""LEO satellite access, link-budget, pre-compensation, mobility and
coverage modelling for direct-to-device NTN studies."""

__version__ = "0.1.0"
