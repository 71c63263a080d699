"""
Domain models for factorizations, test matrices and experiments
"""
