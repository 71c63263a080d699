"""
Configuration package for the randUTV toolkit
"""
