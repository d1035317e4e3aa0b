"""
Unit tests for flt-verify
"""
