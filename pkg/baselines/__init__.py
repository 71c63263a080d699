"""
Comparison factorizations: CPQR, QLP, one-sided Jacobi SVD and the tall-thin SVD
"""
