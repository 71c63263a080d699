"""
Error curves, diagonal study, flop model and the experiment harness
"""
