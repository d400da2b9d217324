"""
Tests package for the critnls toolkit.
"""
