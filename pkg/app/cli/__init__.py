"""
Command-line surface.
"""
