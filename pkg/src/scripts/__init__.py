"""
Scripts de linha de comando do motor multitarefa
"""
