"""
Unit tests for the scintillation core.
"""
