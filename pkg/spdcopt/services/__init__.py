"""Numerical services: dispersion, JSA assembly, metrics and optimization"""
