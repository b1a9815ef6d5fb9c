"""
Output writers and sweep helpers
"""
