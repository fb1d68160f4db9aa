"""
Command-line interface of biham.
"""
