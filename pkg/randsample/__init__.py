"""
Seeded Gaussian sampling, range finder and randomized SVD
"""
