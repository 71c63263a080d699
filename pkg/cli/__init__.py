"""
Command-line subcommand handlers
"""
