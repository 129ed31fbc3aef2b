"""spdcopt - SPDC source-quality optimizer for boson-sampling sources"""
__version__ = "1.0.0"
