"""
Test-matrix generators with analytic spectra where available
"""
