"""
Blocked randomized UTV factorization
"""
