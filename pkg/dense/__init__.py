"""
Dense matrix core: kernels, views and Matrix Market I/O
"""
